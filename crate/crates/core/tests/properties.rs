use proptest::prelude::*;

use tpwa::io::{dataset_from_json, dataset_to_json, model_from_json, model_to_json};
use tpwa::*;

const TAU: f64 = DEFAULT_TOL;

fn data_1d(max_k: usize) -> impl Strategy<Value = DataSet> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..=max_k).prop_map(|pts| {
        let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
        DataSet::from_scalar(&xs, &ys).unwrap()
    })
}

fn data_2d(max_k: usize) -> impl Strategy<Value = DataSet> {
    prop::collection::vec(((-1.0f64..1.0, -1.0f64..1.0), -1.0f64..1.0), 1..=max_k).prop_map(|pts| {
        let xs = pts.iter().map(|((a, b), _)| vec![*a, *b]).collect();
        let ys = pts.iter().map(|(_, y)| vec![*y]).collect();
        DataSet::from_xy(xs, ys).unwrap()
    })
}

fn det(mut m: Vec<Vec<f64>>) -> f64 {
    let n = m.len();
    let mut out = 1.0;
    for c in 0..n {
        let p = (c..n)
            .max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs()))
            .unwrap();
        if m[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            m.swap(p, c);
            out = -out;
        }
        out *= m[c][c];
        let (top, rest) = m.split_at_mut(c + 1);
        let pivot = &top[c];
        for row in rest {
            let f = row[c] / pivot[c];
            for (v, p) in row[c..].iter_mut().zip(&pivot[c..]) {
                *v -= f * p;
            }
        }
    }
    out
}

/// Best uniform fit error on `d + 2` affinely independent points: with `λ`
/// spanning the null space of the columns `[x_k; 1]`,
/// `t = |Σ λ_k y_k| / Σ |λ_k|`.
fn circuit_error(xs: &[Vec<f64>], ys: &[f64]) -> f64 {
    let n = xs.len();
    let lambda: Vec<f64> = (0..n)
        .map(|j| {
            let minor: Vec<Vec<f64>> = (0..n - 1)
                .map(|r| {
                    (0..n)
                        .filter(|&c| c != j)
                        .map(|c| if r < n - 2 { xs[c][r] } else { 1.0 })
                        .collect()
                })
                .collect();
            if j % 2 == 0 {
                det(minor)
            } else {
                -det(minor)
            }
        })
        .collect();
    let num: f64 = lambda.iter().zip(ys).map(|(l, y)| l * y).sum();
    num.abs() / lambda.iter().map(|l| l.abs()).sum::<f64>()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dataset_json_roundtrip_is_exact(data in data_2d(12)) {
        let text = dataset_to_json(&data);
        let back = dataset_from_json(&text).unwrap();
        prop_assert_eq!(&back, &data);
        prop_assert_eq!(dataset_to_json(&back), text);
    }

    #[test]
    fn model_json_is_canonical(data in data_1d(10), eps in 0.0f64..0.3) {
        let model = fit_optimal(&TemplateSpec::rectangular(1), &data, &FitConfig::new(eps)).unwrap();
        let text = model_to_json(&model);
        prop_assert_eq!(model_to_json(&model_from_json(&text).unwrap()), text);
    }

    #[test]
    fn pieces_fit_their_points(data in data_2d(9), eps in 0.0f64..0.3) {
        let model = fit_optimal(&TemplateSpec::rectangular(2), &data, &FitConfig::new(eps)).unwrap();
        prop_assert!(max_residual(&model, &data, OutOfDomainPolicy::Error).unwrap() <= eps + TAU);
        let mut covered = vec![false; data.len() + 1];
        for p in &model.pieces {
            p.support.iter().for_each(|k| covered[k] = true);
        }
        prop_assert!(covered[1..].iter().all(|&c| c));
    }

    #[test]
    fn fewer_pieces_with_larger_tolerance(data in data_1d(12), a in 0.0f64..0.3, b in 0.0f64..0.3) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let t = TemplateSpec::rectangular(1);
        let q_lo = fit_optimal(&t, &data, &FitConfig::new(lo)).unwrap().q();
        let q_hi = fit_optimal(&t, &data, &FitConfig::new(hi)).unwrap().q();
        prop_assert!(q_hi <= q_lo);
    }

    #[test]
    fn piece_count_is_scale_invariant(data in data_2d(8), eps in 0.01f64..0.3, e in -3i32..4) {
        // Powers of two keep every product exact.
        let s = 2f64.powi(e);
        let scaled = DataSet::from_xy(
            data.points().iter().map(|p| p.x.iter().map(|v| v * s).collect()).collect(),
            data.points().iter().map(|p| p.y.iter().map(|v| v * s).collect()).collect(),
        )
        .unwrap();
        let t = TemplateSpec::rectangular(2);
        let q = fit_optimal(&t, &data, &FitConfig::new(eps)).unwrap().q();
        let q_scaled = fit_optimal(&t, &scaled, &FitConfig::new(eps * s)).unwrap().q();
        prop_assert_eq!(q, q_scaled);
    }

    #[test]
    fn chebyshev_error_matches_circuit_formula(
        d in 1usize..=3,
        coords in prop::collection::vec(-1.0f64..1.0, 20),
        ys in prop::collection::vec(-1.0f64..1.0, 5),
    ) {
        let n = d + 2;
        let xs: Vec<Vec<f64>> = (0..n).map(|k| coords[k * d..(k + 1) * d].to_vec()).collect();
        // Skip nearly degenerate configurations, whose null space is not
        // one-dimensional in floating point.
        let vol: Vec<Vec<f64>> = (1..=d).map(|k| (0..d).map(|r| xs[k][r] - xs[0][r]).collect()).collect();
        prop_assume!(det(vol).abs() > 1e-3);
        let data = DataSet::from_xy(xs.clone(), ys[..n].iter().map(|&y| vec![y]).collect()).unwrap();
        let fit = chebyshev_fit(&data, &IndexSet::full(n)).unwrap();
        let expected = circuit_error(&xs, &ys[..n]);
        prop_assert!((fit.t_min - expected).abs() <= 1e-8 * (1.0 + expected), "{} vs {}", fit.t_min, expected);
    }

    #[test]
    fn certificates_are_small_and_valid(data in data_2d(14), eps in 0.0f64..0.2) {
        let all = IndexSet::full(data.len());
        prop_assume!(!is_compatible(&data, &all, eps, TAU).unwrap());
        let cert = extract_certificate(&data, &all, eps, TAU).unwrap();
        prop_assert!(cert.indices.len() <= data.d() + 2);
        prop_assert!(verify_certificate(&data, &cert, eps, TAU));
    }

    #[test]
    fn children_drop_part_of_the_certificate(data in data_2d(14), eps in 0.0f64..0.2) {
        let t = TemplateSpec::rectangular(2);
        let all = IndexSet::full(data.len());
        prop_assume!(!is_compatible(&data, &all, eps, TAU).unwrap());
        let cert = extract_certificate(&data, &all, eps, TAU).unwrap();
        let offset = canonical_offset(&t, &data, &all).unwrap();
        for (child, c) in find_subsets(&t, &data, &all, &offset, &cert.indices, TAU).unwrap() {
            prop_assert!(child.len() < all.len());
            prop_assert!(!cert.indices.is_subset_of(&child));
            prop_assert_eq!(induced_index_set(&t, &data, &c, TAU).unwrap(), child);
        }
    }
}

//! Expected values recomputed along routes that share no code with the
//! library: exact rational arithmetic for the worked 3×3 example, and naive
//! per-entry loops for norms and products.

use matchfactor::*;

/// Minimal exact rational with i128 parts, enough for small hand examples.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Q(i128, i128);

impl Q {
    fn norm(self) -> Q {
        fn gcd(a: i128, b: i128) -> i128 {
            if b == 0 { a.abs() } else { gcd(b, a % b) }
        }
        let g = gcd(self.0, self.1).max(1);
        Q(self.0 / g, self.1 / g)
    }
    fn add(self, o: Q) -> Q {
        Q(self.0 * o.1 + o.0 * self.1, self.1 * o.1).norm()
    }
    fn mul(self, o: Q) -> Q {
        Q(self.0 * o.0, self.1 * o.1).norm()
    }
    fn to_f64(self) -> f64 {
        self.0 as f64 / self.1 as f64
    }
}

fn example_q() -> [[Q; 3]; 3] {
    let z = Q(0, 1);
    let t = Q(1, 3);
    let tt = Q(2, 3);
    [[t, t, t], [z, tt, t], [tt, z, t]]
}

fn exact_lambdas(m: &[[Q; 3]; 3]) -> [Q; 3] {
    let mut out = [Q(0, 1); 3];
    for k in 0..3 {
        let mut r = Q(0, 1);
        let mut c = Q(0, 1);
        for j in 0..3 {
            r = r.add(m[k][j].mul(m[k][j]));
            c = c.add(m[j][k].mul(m[j][k]));
        }
        out[k] = r.mul(c);
    }
    out
}

fn example_f64() -> DenseMatrix {
    let rows: Vec<Vec<f64>> = example_q().iter().map(|r| r.iter().map(|q| q.to_f64()).collect()).collect();
    DenseMatrix::from_rows(&rows).unwrap()
}

#[test]
fn exact_rational_lambdas_match_hand_values() {
    let l = exact_lambdas(&example_q());
    assert_eq!(l, [Q(5, 27), Q(25, 81), Q(5, 27)]);
    assert_eq!(l[0].mul(l[1]).mul(l[2]), Q(625, 59049));
}

#[test]
fn library_agrees_with_exact_oracle() {
    let l = exact_lambdas(&example_q());
    let prof = matching_factor(&example_f64()).unwrap();
    for k in 0..3 {
        let e = l[k].to_f64();
        assert!((prof.lambdas[k] - e).abs() <= 1e-12 * e);
        assert!((lambda_k(&example_f64(), k).unwrap() - e).abs() <= 1e-12 * e);
    }
    let m = 625.0 / 59049.0;
    assert!((prof.m_linear - m).abs() <= 1e-12 * m);
}

#[test]
fn marginals_match_direct_summation() {
    let q = example_q();
    let marg = marginals(&example_f64());
    for k in 0..3 {
        let mut r = Q(0, 1);
        let mut c = Q(0, 1);
        for j in 0..3 {
            r = r.add(q[k][j].mul(q[k][j]));
            c = c.add(q[j][k].mul(q[j][k]));
        }
        assert!((marg.row_norms_sq[k] - r.to_f64()).abs() < 1e-15);
        assert!((marg.col_norms_sq[k] - c.to_f64()).abs() < 1e-15);
    }
    assert_eq!(exact_lambdas(&q)[0], Q(1, 3).mul(Q(5, 9)));
}

#[test]
fn squared_power_matches_exact_product() {
    let q = example_q();
    let mut sq = [[Q(0, 1); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                sq[i][j] = sq[i][j].add(q[i][k].mul(q[k][j]));
            }
        }
    }
    assert_eq!(sq[1], [Q(2, 9), Q(4, 9), Q(1, 3)]);
    let l = exact_lambdas(&sq);
    let m = l[0].mul(l[1]).mul(l[2]);
    assert_eq!(m, Q(707281, 387420489));

    let rec = power_trajectory(&example_f64(), 2, &ToleranceConfig::default(), 1e-3).unwrap();
    assert!((rec.samples[1].1 - m.to_f64().ln()).abs() < 1e-12);
}

#[test]
fn star_lambda_of_star_positive_example() {
    // [[1/2, 0], [1/2, 1/2]]: row 0 norm 1/4 sum 1/2, column 0 norm 1/2 sum 1.
    let a = DenseMatrix::from_rows(&[[0.5, 0.0], [0.5, 0.5]]).unwrap();
    let expect = Q(1, 4).mul(Q(1, 2)).mul(Q(4, 1)).to_f64();
    assert_eq!(star_lambda_k(&a, 0).unwrap(), expect);
}

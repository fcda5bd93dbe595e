#![allow(dead_code)]

use rand::Rng;
use sproc::linrat::{rat, ratio, Polyhedron, Rational};
use sproc::rockafellian::{AffinePiece, ConstraintPerturbation, PolyhedralFn, QuadraticFn, Rockafellian};

/// Half-integers in `[-5, 5]`.
pub fn coef(rng: &mut impl Rng) -> Rational {
    ratio(rng.gen_range(-10..=10), 2)
}

pub fn random_polyhedral(rng: &mut impl Rng, dim_x: usize, dim_y: usize) -> PolyhedralFn {
    let d = dim_x + dim_y;
    let k = rng.gen_range(1..=4);
    let pieces = (0..k)
        .map(|_| AffinePiece::new((0..d).map(|_| coef(rng)).collect(), coef(rng)))
        .collect();
    let domain = if rng.gen_bool(0.3) {
        let mut p = Polyhedron::universe(d).unwrap();
        for _ in 0..rng.gen_range(1..=2) {
            p.push_le((0..d).map(|_| rat(rng.gen_range(-3..=3))).collect(), rat(rng.gen_range(-2..=5)))
                .unwrap();
        }
        Some(p)
    } else {
        None
    };
    PolyhedralFn::new(pieces, domain).unwrap()
}

/// `xᵀQx + aᵀx + c` with integer data.
pub fn quad(q: Vec<Vec<i64>>, a: Vec<i64>, c: i64) -> QuadraticFn {
    QuadraticFn::new(
        q.into_iter().map(|r| r.into_iter().map(rat).collect()).collect(),
        a.into_iter().map(rat).collect(),
        rat(c),
    )
    .unwrap()
}

/// `MᵀM + shift·I` for a random integer `M`.
pub fn gram(rng: &mut impl Rng, n: usize, range: i64, shift: i64) -> Vec<Vec<i64>> {
    let m: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-range..=range)).collect()).collect();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| m[k][i] * m[k][j]).sum::<i64>() + if i == j { shift } else { 0 })
                .collect()
        })
        .collect()
}

pub fn symmetric(rng: &mut impl Rng, n: usize, range: i64) -> Vec<Vec<i64>> {
    let mut q = vec![vec![0; n]; n];
    for i in 0..n {
        for j in i..n {
            let v = rng.gen_range(-range..=range);
            q[i][j] = v;
            q[j][i] = v;
        }
    }
    q
}

pub fn vector(rng: &mut impl Rng, n: usize, range: i64) -> Vec<i64> {
    (0..n).map(|_| rng.gen_range(-range..=range)).collect()
}

pub fn cp(f: QuadraticFn, g: Vec<QuadraticFn>) -> Rockafellian {
    Rockafellian::ConstraintPerturbation(ConstraintPerturbation::new(f, g).unwrap())
}

/// Convex objective, strongly convex constraints with `g(0) < 0`.
pub fn random_convex_cp(rng: &mut impl Rng, n: usize, m: usize) -> Rockafellian {
    let f = quad(gram(rng, n, 2, 0), vector(rng, n, 3), rng.gen_range(-5..=5));
    let g = (0..m)
        .map(|_| quad(gram(rng, n, 1, 1), vector(rng, n, 2), rng.gen_range(-5..=-1)))
        .collect();
    cp(f, g)
}

/// Arbitrary symmetric data.
pub fn random_cp(rng: &mut impl Rng, n: usize, m: usize) -> Rockafellian {
    let f = quad(symmetric(rng, n, 3), vector(rng, n, 3), rng.gen_range(-5..=5));
    let g = (0..m)
        .map(|_| quad(symmetric(rng, n, 3), vector(rng, n, 3), rng.gen_range(-5..=5)))
        .collect();
    cp(f, g)
}

pub fn print_line(n: u32, name: &str, pass: bool, detail: &str) {
    println!("criterion {n} [{}] {name}: {detail}", if pass { "PASS" } else { "FAIL" });
}

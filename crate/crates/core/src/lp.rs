//! Exact feasibility for homogeneous strict systems, via a phase-one simplex with Bland's rule.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

type Q = BigRational;

/// Finds `x` with `eqs · x = 0` and `strict · x >= 1` row-wise, `x` unrestricted in sign.
///
/// Because the system is homogeneous, this decides `eqs · x = 0, strict · x > 0`.
pub fn find_strict_solution(eqs: &[Vec<Q>], strict: &[Vec<Q>], n: usize) -> Option<Vec<Q>> {
    let m = eqs.len() + strict.len();
    if m == 0 {
        return Some(vec![Q::zero(); n]);
    }
    let ns = strict.len();
    // columns: x+ (n), x- (n), surplus (ns), artificial (m), rhs
    let cols = 2 * n + ns + m;
    let mut t: Vec<Vec<Q>> = Vec::with_capacity(m + 1);
    for (i, row) in eqs.iter().chain(strict.iter()).enumerate() {
        assert_eq!(row.len(), n, "constraint width");
        let mut r = vec![Q::zero(); cols + 1];
        for j in 0..n {
            r[j] = row[j].clone();
            r[n + j] = -row[j].clone();
        }
        if i >= eqs.len() {
            r[2 * n + (i - eqs.len())] = -Q::one();
            r[cols] = Q::one();
        }
        r[2 * n + ns + i] = Q::one();
        t.push(r);
    }
    // objective: minimise the sum of artificials, written in reduced form
    let mut obj = vec![Q::zero(); cols + 1];
    for r in &t {
        for j in 0..2 * n + ns {
            obj[j] -= &r[j];
        }
        obj[cols] -= &r[cols];
    }
    t.push(obj);
    let mut basis: Vec<usize> = (0..m).map(|i| 2 * n + ns + i).collect();

    loop {
        let Some(enter) = (0..cols).find(|&j| t[m][j].is_negative()) else {
            break;
        };
        let mut leave: Option<(usize, Q)> = None;
        for i in 0..m {
            if t[i][enter].is_positive() {
                let ratio = &t[i][cols] / &t[i][enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        // phase one is bounded below by zero, so a pivot row always exists
        let (pr, _) = leave.expect("phase-one objective is bounded");
        pivot(&mut t, pr, enter);
        basis[pr] = enter;
    }
    if !t[m][cols].is_zero() {
        return None;
    }
    let mut values = vec![Q::zero(); 2 * n];
    for (i, &b) in basis.iter().enumerate() {
        if b < 2 * n {
            values[b] = t[i][cols].clone();
        }
    }
    Some((0..n).map(|j| &values[j] - &values[n + j]).collect())
}

fn pivot(t: &mut [Vec<Q>], pr: usize, pc: usize) {
    let p = t[pr][pc].clone();
    for v in t[pr].iter_mut() {
        *v /= &p;
    }
    let prow = t[pr].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i == pr || row[pc].is_zero() {
            continue;
        }
        let f = row[pc].clone();
        for (v, pv) in row.iter_mut().zip(&prow) {
            if !pv.is_zero() {
                *v -= &f * pv;
            }
        }
    }
}


/// Same contract as [`find_strict_solution`], trying a floating-point perceptron first and
/// keeping its answer only after exact verification.
pub fn find_strict_solution_guided(eqs: &[Vec<Q>], strict: &[Vec<Q>], n: usize) -> Option<Vec<Q>> {
    if let Some(x) = float_guess(eqs, strict, n) {
        return Some(x);
    }
    find_strict_solution(eqs, strict, n)
}

fn to_f64(q: &Q) -> f64 {
    num_traits::ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
}

/// Orthonormal basis of the orthogonal complement of the rows, by Gram-Schmidt.
fn complement_basis(rows: &[Vec<f64>], n: usize) -> Vec<Vec<f64>> {
    let mut span: Vec<Vec<f64>> = Vec::new();
    let reduce = |v: &[f64], span: &Vec<Vec<f64>>| {
        let mut w = v.to_vec();
        for b in span {
            let c: f64 = w.iter().zip(b).map(|(x, y)| x * y).sum();
            for (x, y) in w.iter_mut().zip(b) {
                *x -= c * y;
            }
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        (norm > 1e-9).then(|| w.iter().map(|x| x / norm).collect::<Vec<f64>>())
    };
    for r in rows {
        if let Some(w) = reduce(r, &span) {
            span.push(w);
        }
    }
    let mut out = Vec::new();
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        let all: Vec<Vec<f64>> = span.iter().chain(out.iter()).cloned().collect();
        if let Some(w) = reduce(&e, &all) {
            out.push(w);
        }
    }
    out
}

fn float_guess(eqs: &[Vec<Q>], strict: &[Vec<Q>], n: usize) -> Option<Vec<Q>> {
    let fe: Vec<Vec<f64>> = eqs.iter().map(|r| r.iter().map(to_f64).collect()).collect();
    let fs: Vec<Vec<f64>> = strict.iter().map(|r| r.iter().map(to_f64).collect()).collect();
    if fe.iter().chain(&fs).flatten().any(|x| !x.is_finite()) {
        return None;
    }
    let basis = complement_basis(&fe, n);
    if basis.is_empty() {
        return None;
    }
    // strict rows in complement coordinates, normalized
    let rows: Vec<Vec<f64>> = fs
        .iter()
        .map(|r| {
            let p: Vec<f64> = basis.iter().map(|b| b.iter().zip(r).map(|(x, y)| x * y).sum()).collect();
            let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-12);
            p.into_iter().map(|x| x / norm).collect()
        })
        .collect();
    let k = basis.len();
    let mut u: Vec<f64> = (0..k).map(|j| rows.iter().map(|r| r[j]).sum()).collect();
    let mut found = false;
    for _ in 0..2000 {
        let unorm = u.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-12);
        let worst = rows
            .iter()
            .map(|r| (r.iter().zip(&u).map(|(x, y)| x * y).sum::<f64>() / unorm, r))
            .min_by(|a, b| a.0.total_cmp(&b.0));
        match worst {
            None => {
                found = true;
                break;
            }
            Some((m, _)) if m > 1e-6 => {
                found = true;
                break;
            }
            Some((_, r)) => {
                for (x, y) in u.iter_mut().zip(r) {
                    *x += y;
                }
            }
        }
    }
    if !found {
        return None;
    }
    let x: Vec<f64> = (0..n).map(|i| basis.iter().zip(&u).map(|(b, c)| b[i] * c).sum()).collect();
    let scale = 1e6 / x.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-12);
    let mut z: Vec<Q> = x.iter().map(|v| Q::from_integer(num_bigint::BigInt::from((v * scale).round() as i64))).collect();
    // exact projection onto the solution space of the equations
    if !eqs.is_empty() {
        z = project_exact(eqs, &z)?;
    }
    let dot = |r: &Vec<Q>| r.iter().zip(&z).fold(Q::zero(), |acc, (a, b)| acc + a * b);
    if eqs.iter().all(|r| dot(r).is_zero()) && strict.iter().all(|r| dot(r).is_positive()) {
        let min = strict.iter().map(dot).min().unwrap_or_else(Q::one);
        Some(z.into_iter().map(|v| v / &min).collect())
    } else {
        None
    }
}

/// `z - Eᵀ (E Eᵀ)⁺ E z` for the row space of `E`, computed on an independent subset of rows.
fn project_exact(eqs: &[Vec<Q>], z: &[Q]) -> Option<Vec<Q>> {
    let mut basis: Vec<Vec<Q>> = Vec::new();
    // exact Gram-Schmidt keeps everything rational
    for r in eqs {
        let mut w = r.clone();
        for b in &basis {
            let bb: Q = b.iter().map(|x| x * x).sum();
            let c: Q = w.iter().zip(b).map(|(x, y)| x * y).sum::<Q>() / bb;
            for (x, y) in w.iter_mut().zip(b) {
                *x -= &c * y;
            }
        }
        if w.iter().any(|x| !x.is_zero()) {
            basis.push(w);
        }
    }
    let mut out = z.to_vec();
    for b in &basis {
        let bb: Q = b.iter().map(|x| x * x).sum();
        let c: Q = out.iter().zip(b).map(|(x, y)| x * y).sum::<Q>() / bb;
        for (x, y) in out.iter_mut().zip(b) {
            *x -= &c * y;
        }
    }
    Some(out)
}

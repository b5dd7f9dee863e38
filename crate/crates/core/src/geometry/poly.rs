//! Real-root isolation for low-degree polynomials.
//!
//! Roots are enumerated by splitting the real line at the critical points
//! (real roots of the derivative, found recursively) and solving on every
//! monotone piece with a bracketed Newton/bisection hybrid. Each piece holds
//! at most one simple root, so no root is skipped; even-multiplicity roots
//! are picked up as critical points where the polynomial vanishes.

use crate::Real;

/// Coefficients in ascending order: `c[0] + c[1] x + c[2] x^2 + ...`.
pub(crate) fn eval<T: Real>(c: &[T], x: T) -> T {
    c.iter().rev().fold(T::zero(), |acc, &a| acc * x + a)
}

/// Value and derivative by Horner's rule.
fn eval_d<T: Real>(c: &[T], x: T) -> (T, T) {
    let mut p = T::zero();
    let mut dp = T::zero();
    for &a in c.iter().rev() {
        dp = dp * x + p;
        p = p * x + a;
    }
    (p, dp)
}

/// Running-error bound for evaluating `c` at `x`.
fn eval_bound<T: Real>(c: &[T], x: T) -> T {
    let ax = x.abs();
    c.iter().rev().fold(T::zero(), |acc, &a| acc * ax + a.abs())
}

pub(crate) fn mul<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = out[i + j] + x * y;
        }
    }
    out
}

pub(crate) fn add<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| a.get(i).copied().unwrap_or(T::zero()) + b.get(i).copied().unwrap_or(T::zero()))
        .collect()
}

pub(crate) fn scale<T: Real>(a: &[T], s: T) -> Vec<T> {
    a.iter().map(|&x| x * s).collect()
}

fn derivative<T: Real>(c: &[T]) -> Vec<T> {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(i, &a)| a * T::from_usize(i).unwrap())
        .collect()
}

/// All distinct real roots in ascending order.
pub fn real_roots<T: Real>(coeffs: &[T]) -> Vec<T> {
    let mut c: Vec<T> = coeffs.to_vec();
    while c.len() > 1 && c[c.len() - 1] == T::zero() {
        c.pop();
    }
    match c.len() {
        0 | 1 => Vec::new(),
        2 => vec![-c[0] / c[1]],
        3 => quadratic_roots(c[2], c[1], c[0]),
        _ => isolate(&c),
    }
}

fn quadratic_roots<T: Real>(a: T, b: T, c: T) -> Vec<T> {
    let disc = b * b - T::c(4.0) * a * c;
    let scale = b * b + (T::c(4.0) * a * c).abs();
    if disc < T::zero() {
        if -disc <= T::c(8.0) * T::epsilon() * scale {
            return vec![-b / (T::two() * a)];
        }
        return Vec::new();
    }
    if disc == T::zero() {
        return vec![-b / (T::two() * a)];
    }
    let sq = disc.sqrt();
    let q = -T::half() * (b + b.signum() * sq);
    let (r1, r2) = if q == T::zero() {
        (T::zero(), T::zero())
    } else {
        (q / a, c / q)
    };
    if r1 == r2 {
        vec![r1]
    } else if r1 < r2 {
        vec![r1, r2]
    } else {
        vec![r2, r1]
    }
}

fn isolate<T: Real>(c: &[T]) -> Vec<T> {
    let n = c.len() - 1;
    let lead = c[n];
    // Cauchy bound on root magnitude.
    let bound = c[..n]
        .iter()
        .fold(T::zero(), |m, &a| m.max((a / lead).abs()))
        + T::one();

    let mut knots = vec![-bound];
    knots.extend(
        real_roots(&derivative(c))
            .into_iter()
            .filter(|x| x.abs() < bound),
    );
    knots.push(bound);

    let mut roots: Vec<T> = Vec::with_capacity(n);
    let tiny = T::c(16.0) * T::epsilon();
    for w in knots.windows(2) {
        let (a, b) = (w[0], w[1]);
        let fa = eval(c, a);
        let fb = eval(c, b);
        if fa == T::zero() || fa.abs() <= tiny * eval_bound(c, a) {
            push_unique(&mut roots, a);
            continue;
        }
        if fa.signum() != fb.signum() && fb != T::zero() {
            push_unique(&mut roots, bracketed(c, a, b, fa));
        }
    }
    let last = *knots.last().unwrap();
    let fl = eval(c, last);
    if fl == T::zero() || fl.abs() <= tiny * eval_bound(c, last) {
        push_unique(&mut roots, last);
    }
    roots
}

fn push_unique<T: Real>(roots: &mut Vec<T>, r: T) {
    let dup = roots
        .last()
        .is_some_and(|&l| (l - r).abs() <= T::c(4.0) * T::epsilon() * (T::one() + r.abs()));
    if !dup {
        roots.push(r);
    }
}

/// Root of `c` in `[a, b]` given a sign change; `fa = c(a)`.
fn bracketed<T: Real>(c: &[T], mut a: T, mut b: T, fa: T) -> T {
    let neg_at_a = fa < T::zero();
    let mut x = T::half() * (a + b);
    for _ in 0..200 {
        let (f, df) = eval_d(c, x);
        if f == T::zero() {
            return x;
        }
        if (f < T::zero()) == neg_at_a {
            a = x;
        } else {
            b = x;
        }
        let newton = x - f / df;
        let next = if df != T::zero() && newton > a && newton < b {
            newton
        } else {
            T::half() * (a + b)
        };
        if next == x || next <= a || next >= b {
            // Bracket exhausted at working precision.
            return if next > a && next < b { next } else { x };
        }
        x = next;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_roots(roots: &[f64]) -> Vec<f64> {
        roots.iter().fold(vec![1.0], |p, &r| mul(&p, &[-r, 1.0]))
    }

    #[test]
    fn recovers_simple_roots_of_quartic() {
        let want = [-3.5, -0.25, 1.0, 4.0];
        let got = real_roots(&from_roots(&want));
        assert_eq!(got.len(), 4);
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() < 1e-12, "{got:?}");
        }
    }

    #[test]
    fn finds_double_root_by_touching() {
        // (x - 1)^2 (x + 2) (x - 3)
        let got = real_roots(&from_roots(&[1.0, 1.0, -2.0, 3.0]));
        assert_eq!(got.len(), 3, "{got:?}");
        assert!((got[1] - 1.0).abs() < 1e-7);
    }

    #[test]
    fn no_real_roots() {
        // (x^2 + 1)(x^2 + 4)
        assert!(real_roots(&mul(&[1.0, 0.0, 1.0], &[4.0, 0.0, 1.0])).is_empty());
    }

    #[test]
    fn quadratic_and_linear() {
        assert_eq!(real_roots(&[-6.0, 1.0]), vec![6.0]);
        let r: Vec<f64> = real_roots(&[2.0, -3.0, 1.0]);
        assert!((r[0] - 1.0).abs() < 1e-15 && (r[1] - 2.0).abs() < 1e-15);
        assert_eq!(real_roots(&[1.0, 2.0, 1.0]), vec![-1.0]);
    }

    #[test]
    fn wide_dynamic_range() {
        let want = [-1e6, 1e-3, 2.0, 5e5];
        let got = real_roots(&from_roots(&want));
        assert_eq!(got.len(), 4);
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() <= 1e-9 * w.abs().max(1.0), "{g} vs {w}");
        }
    }
}

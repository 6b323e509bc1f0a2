//! Bracketed scalar root finding.

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum RootError {
    #[error("no sign change on [{lo}, {hi}]: f = {flo}, {fhi}")]
    NoSignChange { lo: f64, hi: f64, flo: f64, fhi: f64 },
    #[error("function is not finite at t = {t}")]
    NonFinite { t: f64 },
    #[error("no bracket found before reaching t = {cap}")]
    NotBracketed { cap: f64 },
}

fn finite(t: f64, v: f64) -> Result<f64, RootError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(RootError::NonFinite { t })
    }
}

/// Brent's method: inverse quadratic interpolation and secant steps guarded
/// by bisection. Stops when `|f| <= tol` or the bracket is narrower than
/// `tol` (plus a few ulps of the iterate).
pub fn find_root<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64, RootError> {
    let (mut a, mut b) = (lo, hi);
    let mut fa = finite(a, f(a))?;
    let mut fb = finite(b, f(b))?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(RootError::NoSignChange {
            lo,
            hi,
            flo: fa,
            fhi: fb,
        });
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let xtol = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let m = 0.5 * (c - b);
        if m.abs() <= xtol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= xtol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (xtol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > xtol { d } else { xtol.copysign(m) };
        fb = finite(b, f(b))?;
    }
    Ok(b)
}

/// Grows `hi` geometrically by `factor` until `f` changes sign on `[lo, hi]`
/// or `hi` passes `cap`.
pub fn expand_bracket<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    mut hi: f64,
    factor: f64,
    cap: f64,
) -> Result<(f64, f64), RootError> {
    let flo = finite(lo, f(lo))?;
    let mut prev = lo;
    loop {
        let fhi = f(hi);
        if fhi.is_finite() && (fhi == 0.0 || fhi.signum() != flo.signum()) {
            return Ok((prev, hi));
        }
        if hi >= cap {
            return Err(RootError::NotBracketed { cap });
        }
        if fhi.is_finite() {
            prev = hi;
        }
        hi = (hi * factor).min(cap);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic() {
        let r = find_root(|t| t * t - 4.0, 0.0, 3.0, 1e-14).unwrap();
        assert!((r - 2.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_minimal_sphere() {
        let r = find_root(|t| 2.0 / t - t, 0.1, 10.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn golden_ratio_conjugate() {
        let r = find_root(|t| 1.0 / t - t - 1.0, 0.1, 10.0, 1e-14).unwrap();
        assert!((r - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_same_sign() {
        assert!(matches!(
            find_root(|t| t * t + 1.0, -1.0, 1.0, 1e-12),
            Err(RootError::NoSignChange { .. })
        ));
    }

    #[test]
    fn expansion_finds_far_root() {
        let (lo, hi) = expand_bracket(|t| 1000.0 - t, 1.0, 2.0, 2.0, 1e6).unwrap();
        assert!(lo < 1000.0 && 1000.0 <= hi);
        assert!(expand_bracket(|t| 1.0 / t, 1.0, 2.0, 2.0, 1e6).is_err());
    }
}

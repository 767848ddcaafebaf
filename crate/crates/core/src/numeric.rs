//! Small numerical kernels shared by the geometry modules: 3-vectors,
//! fixed and adaptive quadrature, a classical RK4 step and polynomial
//! extrapolation to zero step size.

use libm::{fabs, sqrt};

pub type Vec3 = [f64; 3];

#[inline]
pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn scale(a: Vec3, k: f64) -> Vec3 {
    [a[0] * k, a[1] * k, a[2] * k]
}

#[inline]
pub fn norm(a: Vec3) -> f64 {
    sqrt(dot(a, a))
}

pub fn normalize(a: Vec3) -> Vec3 {
    scale(a, 1.0 / norm(a))
}

/// Five-point Gauss–Legendre nodes and weights on [0, 1].
pub const GAUSS5: [(f64, f64); 5] = [
    (0.046_910_077_030_668_004, 0.118_463_442_528_094_54),
    (0.230_765_344_947_158_45, 0.239_314_335_249_683_24),
    (0.5, 0.284_444_444_444_444_44),
    (0.769_234_655_052_841_6, 0.239_314_335_249_683_24),
    (0.953_089_922_969_332, 0.118_463_442_528_094_54),
];

// Gauss–Kronrod 7/15 on [-1, 1]; the Kronrod abscissae for the positive half.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let pair = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * h, fabs((kronrod - gauss) * h))
}

/// Adaptive Gauss–Kronrod integration of `f` over `[a, b]` to an absolute
/// tolerance. Subdivision depth is bounded, so the result is always finite
/// for finite integrands.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, abs_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    fn recurse<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (value, err) = gk15(f, a, b);
        if err <= tol || depth == 0 {
            return value;
        }
        let m = 0.5 * (a + b);
        recurse(f, a, m, 0.5 * tol, depth - 1) + recurse(f, m, b, 0.5 * tol, depth - 1)
    }
    recurse(&mut f, a, b, abs_tol, 24)
}

/// One classical fourth-order Runge–Kutta step for an autonomous system.
pub fn rk4_step<const N: usize, F>(f: &mut F, y: &[f64; N], h: f64) -> [f64; N]
where
    F: FnMut(&[f64; N]) -> [f64; N],
{
    let k1 = f(y);
    let k2 = f(&axpy(y, &k1, 0.5 * h));
    let k3 = f(&axpy(y, &k2, 0.5 * h));
    let k4 = f(&axpy(y, &k3, h));
    let mut out = *y;
    for i in 0..N {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

fn axpy<const N: usize>(y: &[f64; N], k: &[f64; N], h: f64) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        out[i] += h * k[i];
    }
    out
}

/// Neville extrapolation to `x = 0` of samples `(x_i, f_i)`.
///
/// Returns the tableau diagonal ending at the last sample: entry `k` is the
/// value after `k` elimination levels, so entry 0 is the raw last sample and
/// the final entry is the fully extrapolated value.
pub fn neville_to_zero(xs: &[f64], fs: &[f64]) -> alloc::vec::Vec<f64> {
    let n = xs.len();
    let mut table: alloc::vec::Vec<f64> = fs.to_vec();
    let mut diagonal = alloc::vec![fs[n - 1]];
    for level in 1..n {
        for i in 0..n - level {
            let (x_lo, x_hi) = (xs[i], xs[i + level]);
            table[i] = (x_lo * table[i + 1] - x_hi * table[i]) / (x_lo - x_hi);
        }
        diagonal.push(table[n - level - 1]);
    }
    diagonal
}

/// Solves the 2×2 system `m · x = r` by Cramer's rule.
pub fn solve2(m: [[f64; 2]; 2], r: [f64; 2]) -> Option<[f64; 2]> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let scale = fabs(m[0][0] * m[1][1]) + fabs(m[0][1] * m[1][0]);
    if det == 0.0 || fabs(det) <= 1e-14 * scale {
        return None;
    }
    Some([
        (r[0] * m[1][1] - m[0][1] * r[1]) / det,
        (m[0][0] * r[1] - r[0] * m[1][0]) / det,
    ])
}

/// Solves the dense `n×n` system `m · x = r` by Gaussian elimination with
/// partial pivoting. `m` is row-major.
pub fn solve_linear(
    mut m: alloc::vec::Vec<f64>,
    mut r: alloc::vec::Vec<f64>,
) -> Option<alloc::vec::Vec<f64>> {
    let n = r.len();
    if m.len() != n * n {
        return None;
    }
    let scale = m.iter().fold(0.0_f64, |acc, x| acc.max(fabs(*x)));
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| fabs(m[a * n + col]).total_cmp(&fabs(m[b * n + col])))
            .unwrap_or(col);
        if fabs(m[pivot * n + col]) <= 1e-13 * scale {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                m.swap(col * n + k, pivot * n + k);
            }
            r.swap(col, pivot);
        }
        for row in col + 1..n {
            let factor = m[row * n + col] / m[col * n + col];
            for k in col..n {
                m[row * n + k] -= factor * m[col * n + k];
            }
            r[row] -= factor * r[col];
        }
    }
    let mut x = alloc::vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = r[row];
        for k in row + 1..n {
            acc -= m[row * n + k] * x[k];
        }
        x[row] = acc / m[row * n + row];
    }
    Some(x)
}

/// Eigenvalues of the symmetric matrix `[[a, c], [c, b]]`, larger first.
pub fn symmetric_eigenvalues(a: f64, b: f64, c: f64) -> (f64, f64) {
    let mean = 0.5 * (a + b);
    let half_diff = 0.5 * (a - b);
    let radius = sqrt(half_diff * half_diff + c * c);
    (mean + radius, mean - radius)
}

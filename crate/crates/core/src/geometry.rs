//! Pointwise Finsler geometry on the slit tangent bundle.
//!
//! Everything here is evaluated from jets of `F`: the fundamental tensor
//! from the vertical Hessian of `F²`, the spray from its mixed second and
//! third derivatives, and the Liouville frame `t_k = ∂_k F / F`,
//! `X_k = ∂/∂yᵏ − t_k Z`, with `Z = yⁱ ∂/∂yⁱ`.

use crate::error::{GeomError, Result};
use crate::jets::Jet3;
use crate::linalg::{self, Matrix};
use crate::metrics::{eval_f_seeded, MetricSpec, PointTM, Seeding, DEGENERACY_FLOOR};
use crate::scalar::{max_abs, Real};

#[derive(Clone, Debug, PartialEq)]
pub struct FundamentalTensor<T> {
    /// `g_ij = ½ ∂²F²/∂yⁱ∂yʲ`.
    pub g: Matrix<T>,
    pub g_inv: Matrix<T>,
    /// `dg_dy[i][j][k] = ∂g_ij/∂yᵏ`.
    pub dg_dy: Vec<Vec<Vec<T>>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SprayData<T> {
    /// Spray coefficients `Gⁱ`.
    pub coeffs: Vec<T>,
    /// Nonlinear connection, `conn[i][j] = ∂Gⁱ/∂yʲ`.
    pub conn: Matrix<T>,
}

/// The frame `{X_k}` and the functions `t_k` at a point.
///
/// Generic over the coefficient type so the same structure carries plain
/// values or jets (for derivatives of the frame itself).
#[derive(Clone, Debug, PartialEq)]
pub struct LiouvilleFrame<C> {
    pub t: Vec<C>,
    /// Row `k` holds the components of `X_k` in the `∂/∂y` basis.
    pub x: Vec<Vec<C>>,
    /// Components of `Z`, i.e. `y`.
    pub z: Vec<C>,
}

impl<C> LiouvilleFrame<C> {
    pub fn n(&self) -> usize {
        self.z.len()
    }
}

impl<T: Real> LiouvilleFrame<Jet3<T>> {
    pub fn values(&self) -> LiouvilleFrame<T> {
        LiouvilleFrame {
            t: self.t.iter().map(Jet3::value).collect(),
            x: self
                .x
                .iter()
                .map(|r| r.iter().map(Jet3::value).collect())
                .collect(),
            z: self.z.iter().map(Jet3::value).collect(),
        }
    }
}

/// Builds the Liouville frame from a jet of `F` and the seeded fiber
/// coordinates (`offset` is the slot of `y¹` among the jet variables).
pub fn frame_from_f<T: Real>(f: &Jet3<T>, y: &[Jet3<T>], offset: usize) -> Result<LiouvilleFrame<Jet3<T>>> {
    let n = y.len();
    let t: Vec<Jet3<T>> = (0..n)
        .map(|k| f.partial(offset + k).try_div(f))
        .collect::<Result<_>>()?;
    let m = f.m();
    let x = (0..n)
        .map(|k| {
            (0..n)
                .map(|i| {
                    let d = if i == k { T::one() } else { T::zero() };
                    Jet3::constant(d, m) - &t[k] * &y[i]
                })
                .collect()
        })
        .collect();
    Ok(LiouvilleFrame { t, x, z: y.to_vec() })
}

/// Vertical jets at one point: `F`, the seeded `y`, and the jet-valued
/// frame, all in the `n` fiber variables with `x` frozen.
#[derive(Clone, Debug)]
pub struct FiberJets<T> {
    pub point: PointTM<T>,
    pub f: Jet3<T>,
    pub frame: LiouvilleFrame<Jet3<T>>,
}

impl<T: Real> FiberJets<T> {
    /// From an already computed vertical jet of `F` at `point`.
    pub fn from_f(point: PointTM<T>, f: Jet3<T>) -> Result<Self> {
        let n = point.n();
        let y = Jet3::seed_all(&point.y, 0, n)?;
        let frame = frame_from_f(&f, &y, 0)?;
        Ok(Self { point, f, frame })
    }

    pub fn n(&self) -> usize {
        self.point.n()
    }

    pub fn y(&self) -> &[Jet3<T>] {
        &self.frame.z
    }

    pub fn constant(&self, v: T) -> Jet3<T> {
        Jet3::constant(v, self.n())
    }
}

pub fn fiber_jets<T: Real>(spec: &MetricSpec<T>, p: &PointTM<T>) -> Result<FiberJets<T>> {
    let f = eval_f_seeded(spec, p, Seeding::Vertical)?;
    FiberJets::from_f(p.clone(), f)
}

fn f_squared_full<T: Real>(spec: &MetricSpec<T>, p: &PointTM<T>) -> Result<Jet3<T>> {
    let f = eval_f_seeded(spec, p, Seeding::Full)?;
    Ok(&f * &f)
}

fn tensor_from_f2<T: Real>(h: &Jet3<T>, n: usize, off: usize) -> Result<FundamentalTensor<T>> {
    let half = T::lit(0.5);
    let g: Matrix<T> = (0..n)
        .map(|i| (0..n).map(|j| half * h.hess(off + i, off + j)).collect())
        .collect();
    let min_eigenvalue = linalg::symmetric_eigenvalues(&g)[0];
    if !(min_eigenvalue > T::lit(DEGENERACY_FLOOR)) {
        return Err(GeomError::DegenerateMetric {
            min_eigenvalue: min_eigenvalue.as_f64(),
        });
    }
    let g_inv = linalg::inverse(&g).map_err(|_| GeomError::DegenerateMetric {
        min_eigenvalue: min_eigenvalue.as_f64(),
    })?;
    let dg_dy = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    (0..n)
                        .map(|k| half * h.third(off + i, off + j, off + k))
                        .collect()
                })
                .collect()
        })
        .collect();
    Ok(FundamentalTensor { g, g_inv, dg_dy })
}

pub fn fundamental_tensor<T: Real>(spec: &MetricSpec<T>, p: &PointTM<T>) -> Result<FundamentalTensor<T>> {
    let h = eval_f_seeded(spec, p, Seeding::Vertical)?;
    tensor_from_f2(&(&h * &h), p.n(), 0)
}

/// `t_k = yⁱ g_ki / F²`, the tensor form of the Liouville covector.
pub fn t_from_tensor<T: Real>(ft: &FundamentalTensor<T>, y: &[T], f: T) -> Vec<T> {
    let f2 = f * f;
    ft.g.iter()
        .map(|row| row.iter().zip(y).map(|(g, yi)| *g * *yi).sum::<T>() / f2)
        .collect()
}

/// Spray coefficients and nonlinear connection:
/// `Gⁱ = ¼ gⁱᵏ (∂²F²/∂yᵏ∂xʰ yʰ − ∂F²/∂xᵏ)`, `Gⁱⱼ = ∂Gⁱ/∂yʲ`.
pub fn spray<T: Real>(spec: &MetricSpec<T>, p: &PointTM<T>) -> Result<SprayData<T>> {
    let n = p.n();
    let h = f_squared_full(spec, p)?;
    let ft = tensor_from_f2(&h, n, n)?;
    let y = &p.y;
    let yk = |k: usize| n + k;
    // A_k = H_{y_k x_h} yʰ − H_{x_k}
    let a: Vec<T> = (0..n)
        .map(|k| (0..n).map(|hh| h.hess(yk(k), hh) * y[hh]).sum::<T>() - h.grad(k))
        .collect();
    // ∂A_k/∂yʲ = H_{y_k x_h y_j} yʰ + H_{y_k x_j} − H_{x_k y_j}
    let da: Matrix<T> = (0..n)
        .map(|k| {
            (0..n)
                .map(|j| {
                    (0..n).map(|hh| h.third(yk(k), hh, yk(j)) * y[hh]).sum::<T>() + h.hess(yk(k), j)
                        - h.hess(k, yk(j))
                })
                .collect()
        })
        .collect();
    let quarter = T::lit(0.25);
    let gi = &ft.g_inv;
    let coeffs: Vec<T> = (0..n)
        .map(|i| quarter * (0..n).map(|k| gi[i][k] * a[k]).sum::<T>())
        .collect();
    let mut conn = vec![vec![T::zero(); n]; n];
    for (i, row) in conn.iter_mut().enumerate() {
        for (j, c) in row.iter_mut().enumerate() {
            let mut acc = T::zero();
            for k in 0..n {
                // ∂g^{ik}/∂yʲ = −g^{ia} ∂_j g_ab g^{bk}
                let mut dgi = T::zero();
                for aa in 0..n {
                    for bb in 0..n {
                        dgi = dgi - gi[i][aa] * ft.dg_dy[aa][bb][j] * gi[bb][k];
                    }
                }
                acc = acc + dgi * a[k] + gi[i][k] * da[k][j];
            }
            *c = quarter * acc;
        }
    }
    Ok(SprayData { coeffs, conn })
}

/// Horizontal frame `δ/δxⁱ = ∂/∂xⁱ − Gʲᵢ ∂/∂yʲ` as `2n`-component vectors in
/// the coordinate basis `(∂/∂x, ∂/∂y)`.
pub fn adapted_frame<T: Real>(spec: &MetricSpec<T>, p: &PointTM<T>) -> Result<Matrix<T>> {
    let sp = spray(spec, p)?;
    Ok(horizontal_from_spray(&sp))
}

pub fn horizontal_from_spray<T: Real>(sp: &SprayData<T>) -> Matrix<T> {
    let n = sp.coeffs.len();
    (0..n)
        .map(|i| {
            let mut v = vec![T::zero(); 2 * n];
            v[i] = T::one();
            for j in 0..n {
                v[n + j] = -sp.conn[j][i];
            }
            v
        })
        .collect()
}

/// Re-expresses a coordinate-basis tangent vector `(a, b)` in the adapted
/// basis `(δ/δx, ∂/∂y)`: the vertical part becomes `bʲ + aⁱ Gʲᵢ`.
pub fn to_adapted<T: Real>(sp: &SprayData<T>, v: &[T]) -> Vec<T> {
    let n = sp.coeffs.len();
    let mut out = v.to_vec();
    for j in 0..n {
        for i in 0..n {
            out[n + j] = out[n + j] + v[i] * sp.conn[j][i];
        }
    }
    out
}

/// Sasaki pairing of two vectors given in the adapted basis.
pub fn sasaki_pair<T: Real>(spec: &MetricSpec<T>, p: &PointTM<T>, v: &[T], w: &[T]) -> Result<T> {
    let ft = fundamental_tensor(spec, p)?;
    sasaki_pair_with(&ft, v, w)
}

pub fn sasaki_pair_with<T: Real>(ft: &FundamentalTensor<T>, v: &[T], w: &[T]) -> Result<T> {
    let n = ft.g.len();
    if v.len() != 2 * n || w.len() != 2 * n {
        return Err(GeomError::Argument(format!(
            "tangent vectors must have {} components",
            2 * n
        )));
    }
    let mut s = T::zero();
    for i in 0..n {
        for j in 0..n {
            s = s + ft.g[i][j] * (v[i] * w[j] + v[n + i] * w[n + j]);
        }
    }
    Ok(s)
}

/// Embeds a vertical vector as a `2n` tangent vector (zero horizontal part).
pub fn vertical<T: Real>(v: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); v.len()];
    out.extend_from_slice(v);
    out
}

/// Frame values at `p`, with `t_k = (1/F) ∂F/∂yᵏ`.
pub fn liouville_frame<T: Real>(spec: &MetricSpec<T>, p: &PointTM<T>) -> Result<LiouvilleFrame<T>> {
    Ok(fiber_jets(spec, p)?.frame.values())
}

/// `X_k = −(1/yᵏ) Σ_{a≠k} yᵃ X_a`, the linear relation among the frame fields.
pub fn dependent_frame_vector<T: Real>(frame: &LiouvilleFrame<T>, k: usize) -> Result<Vec<T>> {
    let y = &frame.z;
    if y[k].abs() <= T::lit(1e-12) * max_abs(y) {
        return Err(GeomError::Precondition(format!(
            "y^{} vanishes; it cannot be eliminated",
            k + 1
        )));
    }
    let n = frame.n();
    let mut out = vec![T::zero(); n];
    for a in (0..n).filter(|a| *a != k) {
        for (o, xa) in out.iter_mut().zip(&frame.x[a]) {
            *o = *o - y[a] * *xa / y[k];
        }
    }
    Ok(out)
}

/// Basis `{X_i : i ≠ dropped} ∪ {Z}` of the vertical bundle.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameBasis<T> {
    pub dropped: usize,
    /// The `n − 1` retained frame vectors in order, then `Z`.
    pub vectors: Vec<Vec<T>>,
    /// Smallest singular value of the stacked basis.
    pub sigma_min: T,
}

impl<T: Real> FrameBasis<T> {
    /// Indices of the retained `X_a`.
    pub fn kept(&self) -> Vec<usize> {
        (0..self.vectors.len()).filter(|a| *a != self.dropped).collect()
    }
}

pub const BASIS_CERTIFICATE: f64 = 1e-8;

/// Drops `k* = argmax |yⁱ|` (smallest index on ties).
pub fn frame_basis<T: Real>(frame: &LiouvilleFrame<T>) -> Result<FrameBasis<T>> {
    let mut k = 0;
    for (i, v) in frame.z.iter().enumerate() {
        if v.abs() > frame.z[k].abs() {
            k = i;
        }
    }
    frame_basis_dropping(frame, k)
}

pub fn frame_basis_dropping<T: Real>(frame: &LiouvilleFrame<T>, k: usize) -> Result<FrameBasis<T>> {
    let n = frame.n();
    if k >= n {
        return Err(GeomError::Argument(format!("index {k} out of range")));
    }
    if frame.z[k].abs() <= T::lit(1e-12) * max_abs(&frame.z) {
        return Err(GeomError::Precondition(format!(
            "cannot drop X_{}: y^{} is zero",
            k + 1,
            k + 1
        )));
    }
    let mut vectors: Vec<Vec<T>> = (0..n).filter(|a| *a != k).map(|a| frame.x[a].clone()).collect();
    vectors.push(frame.z.clone());
    let sigma_min = linalg::singular_values(&vectors)[0];
    if !(sigma_min > T::lit(BASIS_CERTIFICATE)) {
        return Err(GeomError::SingularBasis {
            sigma_min: sigma_min.as_f64(),
        });
    }
    Ok(FrameBasis {
        dropped: k,
        vectors,
        sigma_min,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pt(x: &[f64], y: &[f64]) -> PointTM<f64> {
        PointTM::new(x.to_vec(), y.to_vec()).unwrap()
    }

    #[test]
    fn euclidean_tensor_is_identity() {
        let ft = fundamental_tensor(&MetricSpec::euclidean(3), &pt(&[0.1; 3], &[0.3, -1.2, 0.5])).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((ft.g[i][j] - e).abs() < 1e-12);
                for k in 0..3 {
                    assert!(ft.dg_dy[i][j][k].abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn quartic_contracts_to_f_squared() {
        let spec = MetricSpec::quartic_with(vec![1.0, 1.0]);
        let ft = fundamental_tensor(&spec, &pt(&[0.0, 0.0], &[1.0, 1.0])).unwrap();
        let s: f64 = (0..2)
            .flat_map(|i| (0..2).map(move |j| (i, j)))
            .map(|(i, j)| ft.g[i][j])
            .sum();
        assert_relative_eq!(s, 2f64.sqrt(), epsilon = 1e-13);
    }

    #[test]
    fn x_independent_metrics_have_no_spray() {
        let p = pt(&[0.4, -0.2, 0.3], &[0.7, 0.9, -0.4]);
        for spec in [MetricSpec::euclidean(3), MetricSpec::minkowski_quartic(3)] {
            let sp = spray(&spec, &p).unwrap();
            assert!(sp.coeffs.iter().all(|v| v.abs() < 1e-14));
            assert!(sp.conn.iter().flatten().all(|v| v.abs() < 1e-14));
            let h = adapted_frame(&spec, &p).unwrap();
            for (i, v) in h.iter().enumerate() {
                for (c, vc) in v.iter().enumerate() {
                    let e = if c == i { 1.0 } else { 0.0 };
                    assert!((vc - e).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn spray_is_two_homogeneous() {
        let p = pt(&[0.4, -0.2, 0.3], &[0.7, 0.9, -0.4]);
        for spec in MetricSpec::<f64>::catalog(3) {
            let a = spray(&spec, &p).unwrap();
            let b = spray(&spec, &p.scaled(2.0).unwrap()).unwrap();
            for i in 0..3 {
                assert!((b.coeffs[i] - 4.0 * a.coeffs[i]).abs() <= 1e-9 * (1.0 + a.coeffs[i].abs()));
                for j in 0..3 {
                    assert!((b.conn[i][j] - 2.0 * a.conn[i][j]).abs() <= 1e-9 * (1.0 + a.conn[i][j].abs()));
                }
            }
        }
    }

    #[test]
    fn euclidean_frame_by_hand() {
        let fr = liouville_frame(&MetricSpec::euclidean(2), &pt(&[0.0, 0.0], &[3.0, 4.0])).unwrap();
        assert_relative_eq!(fr.t[0], 0.12, epsilon = 1e-15);
        assert_relative_eq!(fr.t[1], 0.16, epsilon = 1e-15);
        assert_relative_eq!(fr.t[0] * 3.0 + fr.t[1] * 4.0, 1.0, epsilon = 1e-15);
        assert_relative_eq!(fr.x[0][0], 0.64, epsilon = 1e-15);
        assert_relative_eq!(fr.x[0][1], -0.48, epsilon = 1e-15);
        assert_relative_eq!(fr.x[0][0] * 3.0 + fr.x[0][1] * 4.0, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn derivative_of_t_by_hand() {
        let fj = fiber_jets(&MetricSpec::euclidean(2), &pt(&[0.0, 0.0], &[3.0, 4.0])).unwrap();
        // ∂t_1/∂y² = −2 t_1 t_2 + g_12/F² = −2·0.12·0.16
        assert_relative_eq!(fj.frame.t[0].grad(1), -0.0384, epsilon = 1e-15);
    }

    #[test]
    fn sasaki_pairings() {
        let spec = MetricSpec::euclidean(2);
        let p = pt(&[0.0, 0.0], &[3.0, 4.0]);
        let z = vertical(&p.y);
        assert_relative_eq!(sasaki_pair(&spec, &p, &z, &z).unwrap(), 25.0, epsilon = 1e-12);
        let fr = liouville_frame(&spec, &p).unwrap();
        let x1 = vertical(&fr.x[0]);
        assert!(sasaki_pair(&spec, &p, &x1, &z).unwrap().abs() < 1e-14);
        let h = vec![1.0, 0.0, 0.0, 0.0];
        let v = vec![0.0, 0.0, 0.0, 1.0];
        assert_eq!(sasaki_pair(&spec, &p, &h, &v).unwrap(), 0.0);
        assert!(sasaki_pair(&spec, &p, &h, &[1.0]).is_err());
    }

    #[test]
    fn basis_selection() {
        let spec = MetricSpec::euclidean(2);
        let fr = liouville_frame(&spec, &pt(&[0.0, 0.0], &[3.0, 4.0])).unwrap();
        let b = frame_basis(&fr).unwrap();
        assert_eq!(b.dropped, 1);
        assert_eq!(b.kept(), vec![0]);
        let det = b.vectors[0][0] * b.vectors[1][1] - b.vectors[0][1] * b.vectors[1][0];
        assert_relative_eq!(det, 4.0, epsilon = 1e-14);
        assert!(b.sigma_min > 0.0);

        let fr = liouville_frame(&MetricSpec::euclidean(3), &pt(&[0.0; 3], &[0.0, 0.0, 1.0])).unwrap();
        let b = frame_basis(&fr).unwrap();
        assert_eq!(b.dropped, 2);
        assert!(frame_basis_dropping(&fr, 0).is_err());
        assert!(dependent_frame_vector(&fr, 0).is_err());
    }

    #[test]
    fn degenerate_tensor_is_reported() {
        // quartic metric on a coordinate axis has a null direction
        let spec = MetricSpec::quartic_with(vec![1.0, 1.0]);
        match fundamental_tensor(&spec, &pt(&[0.0, 0.0], &[1.0, 0.0])) {
            Err(GeomError::DegenerateMetric { min_eigenvalue }) => assert!(min_eigenvalue.abs() < 1e-10),
            other => panic!("expected degeneracy, got {other:?}"),
        }
    }
}

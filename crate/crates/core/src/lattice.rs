//! Finitely supported functions on the square lattice and support-set algebra.
//!
//! A [`LatticeField`] stores complex values at finitely many points of
//! `Z^d` (`d` in 1..=3); every point not stored reads as zero. A
//! [`SupportDomain`] is the lattice trace of a bounded domain, kept as an
//! explicit point set together with its axis-aligned bounding box.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 3;

pub(crate) fn check_dim(dim: usize) -> Result<()> {
    if (1..=MAX_DIM).contains(&dim) {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(dim))
    }
}

/// `(2 pi)^(-d/2)`, the normalisation of the lattice Fourier transform.
pub fn fourier_norm(dim: usize) -> f64 {
    (2.0 * std::f64::consts::PI).powf(-(dim as f64) / 2.0)
}

/// A point of `Z^d`, `d <= 3`. Unused trailing coordinates are zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Point([i64; MAX_DIM]);

impl Point {
    pub fn new(coords: &[i64]) -> Result<Self> {
        check_dim(coords.len())?;
        let mut c = [0; MAX_DIM];
        c[..coords.len()].copy_from_slice(coords);
        Ok(Point(c))
    }

    pub fn origin() -> Self {
        Point([0; MAX_DIM])
    }

    /// The unit vector along `axis`.
    pub fn unit(axis: usize) -> Self {
        let mut c = [0; MAX_DIM];
        c[axis] = 1;
        Point(c)
    }

    pub fn coords(&self, dim: usize) -> &[i64] {
        &self.0[..dim]
    }

    pub fn get(&self, axis: usize) -> i64 {
        self.0[axis]
    }

    pub fn scale(&self, s: i64) -> Self {
        Point([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }

    /// `k . x` for a real wave vector `k` of length `dim`.
    pub fn dot(&self, k: &[f64]) -> f64 {
        k.iter().zip(self.0.iter()).map(|(a, &b)| a * b as f64).sum()
    }

    pub fn norm(&self) -> f64 {
        (self.0.iter().map(|&c| (c * c) as f64).sum::<f64>()).sqrt()
    }

    pub fn max_abs(&self) -> i64 {
        self.0.iter().map(|c| c.abs()).max().unwrap_or(0)
    }

    /// Points at lattice distance one: `x +- e_i`, `i < dim`.
    pub fn neighbours(&self, dim: usize) -> impl Iterator<Item = Point> + '_ {
        (0..dim).flat_map(move |axis| {
            let e = Point::unit(axis);
            [*self + e, *self - e]
        })
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0[0], self.0[1], self.0[2])
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point([-self.0[0], -self.0[1], -self.0[2]])
    }
}

/// A finitely supported complex function on `Z^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeField {
    dim: usize,
    entries: BTreeMap<Point, Complex64>,
}

impl LatticeField {
    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(LatticeField {
            dim,
            entries: BTreeMap::new(),
        })
    }

    /// Kronecker delta at `at`, scaled by `value`.
    pub fn delta(dim: usize, at: Point, value: Complex64) -> Result<Self> {
        let mut f = Self::zeros(dim)?;
        f.insert(at, value);
        Ok(f)
    }

    pub fn from_entries<I>(dim: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<i64>, Complex64)>,
    {
        let mut f = Self::zeros(dim)?;
        for (x, v) in entries {
            if x.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: x.len(),
                });
            }
            f.add_at(Point::new(&x)?, v);
        }
        Ok(f)
    }

    /// Builds a field on `domain` from values listed in the domain's point order.
    pub fn from_values(domain: &SupportDomain, values: &[Complex64]) -> Result<Self> {
        if values.len() != domain.len() {
            return Err(Error::InvalidArgument(format!(
                "{} values for a domain of {} points",
                values.len(),
                domain.len()
            )));
        }
        let mut f = Self::zeros(domain.dim())?;
        for (p, v) in domain.points().zip(values) {
            f.insert(*p, *v);
        }
        Ok(f)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, x: &Point) -> Complex64 {
        self.entries.get(x).copied().unwrap_or_default()
    }

    pub fn insert(&mut self, x: Point, v: Complex64) {
        self.entries.insert(x, v);
    }

    pub fn add_at(&mut self, x: Point, v: Complex64) {
        *self.entries.entry(x).or_default() += v;
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Point, &Complex64)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Points carrying a nonzero value.
    pub fn support(&self) -> BTreeSet<Point> {
        self.entries
            .iter()
            .filter(|(_, v)| **v != Complex64::default())
            .map(|(p, _)| *p)
            .collect()
    }

    /// Largest `|x_i|` over stored points.
    pub fn extent(&self) -> i64 {
        self.entries.keys().map(Point::max_abs).max().unwrap_or(0)
    }

    /// Values at the points of `domain`, in the domain's order.
    pub fn values_on(&self, domain: &SupportDomain) -> Vec<Complex64> {
        domain.points().map(|p| self.get(p)).collect()
    }

    pub fn norm_l2(&self) -> f64 {
        self.entries.values().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn norm_inf(&self) -> f64 {
        self.entries.values().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest pointwise difference over the union of stored points.
    pub fn max_abs_diff(&self, other: &LatticeField) -> f64 {
        let keys: BTreeSet<&Point> = self.entries.keys().chain(other.entries.keys()).collect();
        keys.into_iter()
            .map(|p| (self.get(p) - other.get(p)).norm())
            .fold(0.0, f64::max)
    }

    /// `l2` norm of the difference over the union of stored points.
    pub fn diff_l2(&self, other: &LatticeField) -> f64 {
        let keys: BTreeSet<&Point> = self.entries.keys().chain(other.entries.keys()).collect();
        keys.into_iter()
            .map(|p| (self.get(p) - other.get(p)).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn scale(&self, s: Complex64) -> LatticeField {
        self.map(|v| v * s)
    }

    pub fn map(&self, g: impl Fn(Complex64) -> Complex64) -> LatticeField {
        LatticeField {
            dim: self.dim,
            entries: self.entries.iter().map(|(p, v)| (*p, g(*v))).collect(),
        }
    }

    pub fn add(&self, other: &LatticeField) -> Result<LatticeField> {
        self.same_dim(other)?;
        let mut out = self.clone();
        for (p, v) in &other.entries {
            out.add_at(*p, *v);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &LatticeField) -> Result<LatticeField> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Drops entries that are exactly zero.
    pub fn pruned(&self) -> LatticeField {
        LatticeField {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .filter(|(_, v)| **v != Complex64::default())
                .map(|(p, v)| (*p, *v))
                .collect(),
        }
    }

    fn same_dim(&self, other: &LatticeField) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        Ok(())
    }

    /// Evaluates the Fourier transform `(2pi)^(-d/2) sum_x u(x) e^{-i k.x}` at an
    /// arbitrary point `k` by direct summation.
    pub fn fourier_at(&self, k: &[f64]) -> Complex64 {
        let s: Complex64 = self
            .entries
            .iter()
            .map(|(x, v)| v * Complex64::from_polar(1.0, -x.dot(k)))
            .sum();
        s * fourier_norm(self.dim)
    }

    /// Exact finite convolution `(u1 * u2)(x) = sum_y u1(x - y) u2(y)`.
    pub fn convolve(&self, other: &LatticeField) -> Result<LatticeField> {
        self.same_dim(other)?;
        let mut out = LatticeField::zeros(self.dim)?;
        for (x, a) in &self.entries {
            for (y, b) in &other.entries {
                out.add_at(*x + *y, a * b);
            }
        }
        Ok(out)
    }

    /// `u~(x) = conj(u(-x))`.
    pub fn reflect_conjugate(&self) -> LatticeField {
        LatticeField {
            dim: self.dim,
            entries: self.entries.iter().map(|(p, v)| (-*p, v.conj())).collect(),
        }
    }

    /// `(2pi)^(-d/2) (u * u~)`, i.e. the inverse transform of `|F u|^2`.
    pub fn autocorrelation(&self) -> LatticeField {
        let r = self.convolve(&self.reflect_conjugate()).expect("same dimension");
        r.scale(Complex64::new(fourier_norm(self.dim), 0.0))
    }

    /// Multiplies by the indicator of `window`.
    pub fn window(&self, window: &SupportDomain) -> LatticeField {
        LatticeField {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .filter(|(p, _)| window.contains(p))
                .map(|(p, v)| (*p, *v))
                .collect(),
        }
    }

    /// Nearest-neighbour sum `(Delta u)(x) = sum_{|x'-x|=1} u(x')`.
    pub fn laplacian(&self) -> LatticeField {
        let mut out = LatticeField {
            dim: self.dim,
            entries: BTreeMap::new(),
        };
        for (x, v) in &self.entries {
            for y in x.neighbours(self.dim) {
                out.add_at(y, *v);
            }
        }
        out
    }

    /// `(Delta - lambda) u`.
    pub fn helmholtz(&self, lambda: f64) -> LatticeField {
        let mut out = self.laplacian();
        for (x, v) in &self.entries {
            out.add_at(*x, -lambda * v);
        }
        out
    }

    /// `(L_k - lambda) u` with the modulated Laplacian
    /// `L_k u(x) = e^{-ik.x} Delta(e^{ik.x} u)(x) = sum_e e^{ik.e} u(x + e)`.
    pub fn modulated_helmholtz(&self, k: &[f64], lambda: f64) -> LatticeField {
        let mut out = LatticeField {
            dim: self.dim,
            entries: BTreeMap::new(),
        };
        for (x, v) in &self.entries {
            for axis in 0..self.dim {
                let e = Point::unit(axis);
                // u(x) contributes to out(x - e) with phase e^{ik.e}, and to out(x + e) with e^{-ik.e}.
                let phase = Complex64::from_polar(1.0, k[axis]);
                out.add_at(*x - e, v * phase);
                out.add_at(*x + e, v * phase.conj());
            }
            out.add_at(*x, -lambda * v);
        }
        out
    }
}

/// The lattice trace `D cap Z^d` of a bounded domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportDomain {
    dim: usize,
    points: BTreeSet<Point>,
    lo: Point,
    hi: Point,
}

impl SupportDomain {
    pub fn from_points<I: IntoIterator<Item = Point>>(dim: usize, points: I) -> Result<Self> {
        check_dim(dim)?;
        let points: BTreeSet<Point> = points.into_iter().collect();
        if points.is_empty() {
            return Err(Error::EmptySet("support domain"));
        }
        let mut lo = [i64::MAX; MAX_DIM];
        let mut hi = [i64::MIN; MAX_DIM];
        for p in &points {
            for axis in 0..MAX_DIM {
                if axis >= dim && p.get(axis) != 0 {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        got: axis + 1,
                    });
                }
                lo[axis] = lo[axis].min(p.get(axis));
                hi[axis] = hi[axis].max(p.get(axis));
            }
        }
        Ok(SupportDomain {
            dim,
            points,
            lo: Point(lo),
            hi: Point(hi),
        })
    }

    pub fn from_coords(dim: usize, coords: &[Vec<i64>]) -> Result<Self> {
        let pts = coords
            .iter()
            .map(|c| {
                if c.len() != dim {
                    Err(Error::DimensionMismatch {
                        expected: dim,
                        got: c.len(),
                    })
                } else {
                    Point::new(c)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_points(dim, pts)
    }

    /// All lattice points of the box `lo <= x <= hi`.
    pub fn box_domain(lo: &[i64], hi: &[i64]) -> Result<Self> {
        let dim = lo.len();
        check_dim(dim)?;
        if hi.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: hi.len(),
            });
        }
        let mut pts = vec![Point::origin()];
        for axis in 0..dim {
            let mut next = Vec::new();
            for p in &pts {
                for c in lo[axis]..=hi[axis] {
                    let mut q = *p;
                    q.0[axis] = c;
                    next.push(q);
                }
            }
            pts = next;
        }
        Self::from_points(dim, pts)
    }

    pub fn singleton(dim: usize, p: Point) -> Result<Self> {
        Self::from_points(dim, [p])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.points.contains(p)
    }

    /// Points in lexicographic order; this order indexes vectorised fields.
    pub fn points(&self) -> impl Iterator<Item = &Point> {
        self.points.iter()
    }

    /// Bounding box corners.
    pub fn hull(&self) -> (Point, Point) {
        (self.lo, self.hi)
    }

    pub fn extent(&self) -> i64 {
        self.points.iter().map(Point::max_abs).max().unwrap_or(0)
    }

    /// Euclidean diameter over the lattice points.
    pub fn diam(&self) -> f64 {
        let pts: Vec<&Point> = self.points.iter().collect();
        let mut d = 0.0f64;
        for (i, a) in pts.iter().enumerate() {
            for b in &pts[i + 1..] {
                d = d.max((**a - **b).norm());
            }
        }
        d
    }

    pub fn negate(&self) -> SupportDomain {
        SupportDomain::from_points(self.dim, self.points.iter().map(|p| -*p)).expect("nonempty")
    }

    pub fn minkowski_sum(&self, other: &SupportDomain) -> Result<SupportDomain> {
        self.same_dim(other)?;
        let mut pts = BTreeSet::new();
        for a in &self.points {
            for b in &other.points {
                pts.insert(*a + *b);
            }
        }
        SupportDomain::from_points(self.dim, pts)
    }

    /// `D1 - D2 = {x - y}`.
    pub fn difference(&self, other: &SupportDomain) -> Result<SupportDomain> {
        self.minkowski_sum(&other.negate())
    }

    pub fn union(&self, other: &SupportDomain) -> Result<SupportDomain> {
        self.same_dim(other)?;
        SupportDomain::from_points(self.dim, self.points.union(&other.points).copied())
    }

    pub fn intersects(&self, other: &SupportDomain) -> bool {
        self.points.intersection(&other.points).next().is_some()
    }

    /// Euclidean distance between the two lattice point sets.
    pub fn dist(&self, other: &SupportDomain) -> Result<f64> {
        self.same_dim(other)?;
        let mut d = f64::INFINITY;
        for a in &self.points {
            for b in &other.points {
                d = d.min((*a - *b).norm());
            }
        }
        Ok(d)
    }

    fn same_dim(&self, other: &SupportDomain) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn p(c: &[i64]) -> Point {
        Point::new(c).unwrap()
    }

    #[test]
    fn unstored_point_reads_zero() {
        let f = LatticeField::delta(2, p(&[1, 2]), c(3.0, 0.0)).unwrap();
        assert_eq!(f.get(&p(&[0, 0])), c(0.0, 0.0));
        assert_eq!(f.get(&p(&[1, 2])), c(3.0, 0.0));
    }

    #[test]
    fn entries_must_match_dimension() {
        let err = LatticeField::from_entries(2, vec![(vec![1, 2, 3], c(1.0, 0.0))]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
        assert!(LatticeField::zeros(4).is_err());
    }

    #[test]
    fn convolution_with_delta() {
        let u = LatticeField::from_entries(
            2,
            vec![(vec![0, 1], c(1.0, 2.0)), (vec![-1, 0], c(0.5, -1.0))],
        )
        .unwrap();
        let d0 = LatticeField::delta(2, Point::origin(), c(1.0, 0.0)).unwrap();
        assert_eq!(u.convolve(&d0).unwrap().max_abs_diff(&u), 0.0);

        let da = LatticeField::delta(2, p(&[2, -1]), c(1.0, 0.0)).unwrap();
        let db = LatticeField::delta(2, p(&[-5, 3]), c(1.0, 0.0)).unwrap();
        let ab = da.convolve(&db).unwrap();
        assert_eq!(ab.len(), 1);
        assert_eq!(ab.get(&p(&[-3, 2])), c(1.0, 0.0));
    }

    #[test]
    fn convolution_matches_double_loop() {
        let u1 = LatticeField::from_entries(
            2,
            vec![
                (vec![0, 0], c(1.0, 0.5)),
                (vec![0, 1], c(-0.3, 0.2)),
                (vec![1, 0], c(0.7, -1.1)),
                (vec![1, 1], c(0.1, 0.9)),
            ],
        )
        .unwrap();
        let u2 = LatticeField::from_entries(
            2,
            vec![
                (vec![0, 0], c(-0.4, 0.3)),
                (vec![0, 1], c(1.3, 0.0)),
                (vec![1, 0], c(0.2, 0.2)),
                (vec![1, 1], c(-0.8, -0.6)),
            ],
        )
        .unwrap();
        let conv = u1.convolve(&u2).unwrap();
        // dense oracle: x over [0,2]^2, y over [0,1]^2
        for x0 in -1..=3 {
            for x1 in -1..=3 {
                let mut s = c(0.0, 0.0);
                for y0 in 0..=1 {
                    for y1 in 0..=1 {
                        s += u1.get(&p(&[x0 - y0, x1 - y1])) * u2.get(&p(&[y0, y1]));
                    }
                }
                assert_eq!(conv.get(&p(&[x0, x1])), s);
            }
        }
    }

    #[test]
    fn reflect_conjugate_examples() {
        let even = LatticeField::from_entries(
            1,
            vec![(vec![-1], c(2.0, 0.0)), (vec![0], c(1.0, 0.0)), (vec![1], c(2.0, 0.0))],
        )
        .unwrap();
        assert_eq!(even.reflect_conjugate().max_abs_diff(&even), 0.0);

        let u = LatticeField::delta(2, p(&[1, 0]), c(0.0, 1.0)).unwrap();
        let r = u.reflect_conjugate();
        assert_eq!(r.get(&p(&[-1, 0])), c(0.0, -1.0));
        assert_eq!(r.len(), 1);
    }

    #[test]
    fn autocorrelation_examples() {
        let n1 = fourier_norm(1);
        let d = LatticeField::delta(1, Point::origin(), c(1.0, 0.0)).unwrap();
        assert_eq!(d.autocorrelation().get(&Point::origin()), c(n1, 0.0));

        let u = LatticeField::from_entries(1, vec![(vec![0], c(1.0, 0.0)), (vec![5], c(2.0, 0.0))])
            .unwrap();
        let a = u.autocorrelation().pruned();
        assert_eq!(a.len(), 3);
        assert!((a.get(&p(&[0])) - c(5.0 * n1, 0.0)).norm() < 1e-15);
        assert!((a.get(&p(&[5])) - c(2.0 * n1, 0.0)).norm() < 1e-15);
        assert!((a.get(&p(&[-5])) - c(2.0 * n1, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn window_examples() {
        let u = LatticeField::from_entries(1, vec![(vec![0], c(1.0, 0.0)), (vec![5], c(1.0, 0.0))])
            .unwrap();
        let supp = SupportDomain::from_points(1, u.support()).unwrap();
        assert_eq!(u.window(&supp), u);
        let far = SupportDomain::singleton(1, p(&[7])).unwrap();
        assert!(u.window(&far).is_empty());
        let five = SupportDomain::singleton(1, p(&[5])).unwrap();
        let w = u.window(&five);
        assert_eq!(w.len(), 1);
        assert_eq!(w.get(&p(&[5])), c(1.0, 0.0));
    }

    #[test]
    fn laplacian_of_delta_is_unit_shell() {
        for dim in 1..=3 {
            let d = LatticeField::delta(dim, Point::origin(), c(1.0, 0.0)).unwrap();
            let l = d.laplacian();
            assert_eq!(l.len(), 2 * dim);
            for (x, v) in l.iter() {
                assert_eq!(x.norm(), 1.0);
                assert_eq!(*v, c(1.0, 0.0));
            }
        }
    }

    #[test]
    fn laplacian_interior_of_constant_box() {
        let dom = SupportDomain::box_domain(&[-4, -4, -4], &[4, 4, 4]).unwrap();
        let u = LatticeField::from_values(&dom, &vec![c(1.5, -0.5); dom.len()]).unwrap();
        assert_eq!(u.laplacian().get(&Point::origin()), c(9.0, -3.0));
    }

    #[test]
    fn modulated_stencil_on_delta() {
        let k = [0.3, -1.1];
        let d = LatticeField::delta(2, Point::origin(), c(1.0, 0.0)).unwrap();
        let v = d.modulated_helmholtz(&k, 2.0);
        assert_eq!(v.get(&Point::origin()), c(-2.0, 0.0));
        for x in Point::origin().neighbours(2) {
            let expect = Complex64::from_polar(1.0, -x.dot(&k));
            assert!((v.get(&x) - expect).norm() < 1e-15);
        }
    }

    #[test]
    fn support_algebra_examples() {
        let single = SupportDomain::singleton(2, p(&[3, 4])).unwrap();
        assert_eq!(single.diam(), 0.0);
        let neg = SupportDomain::singleton(2, p(&[1, 2])).unwrap().negate();
        assert!(neg.contains(&p(&[-1, -2])));
        assert_eq!(neg.len(), 1);

        let a = SupportDomain::from_coords(2, &[vec![0, 0], vec![1, 0]]).unwrap();
        let b = SupportDomain::from_coords(2, &[vec![0, 0], vec![0, 1]]).unwrap();
        let s = a.minkowski_sum(&b).unwrap();
        let mut oracle = BTreeSet::new();
        for x in a.points() {
            for y in b.points() {
                oracle.insert(*x + *y);
            }
        }
        assert_eq!(s.len(), 4);
        assert!(s.points().eq(oracle.iter()));

        // colliding sums
        let c2 = SupportDomain::from_coords(1, &[vec![0], vec![1]]).unwrap();
        assert_eq!(c2.minkowski_sum(&c2).unwrap().len(), 3);

        assert_eq!(a.dist(&SupportDomain::singleton(2, p(&[4, 4])).unwrap()).unwrap(), 5.0);
        assert!(SupportDomain::from_points(2, Vec::new()).is_err());
    }

    #[test]
    fn box_hull_is_minimal() {
        let dom = SupportDomain::from_coords(2, &[vec![-1, 3], vec![2, 0], vec![0, 1]]).unwrap();
        let (lo, hi) = dom.hull();
        assert_eq!(lo.coords(2), &[-1, 0]);
        assert_eq!(hi.coords(2), &[2, 3]);
        let b = SupportDomain::box_domain(&[0, 0], &[2, 1]).unwrap();
        assert_eq!(b.len(), 6);
    }
}

//! Voxel scanning of a box of ℝ³ and boundary refinement by bisection.

use std::io::{self, Read, Write};

use rayon::prelude::*;

use crate::dynamics::{classify, ClassifierParams, OrbitOutcome, QOutcome, QRationalMap};
use crate::error::{Error, Result};
use crate::parallel::with_workers;
use crate::quat::Quaternion;
use crate::scalar::{grid_coord, Real};

/// Axis-aligned box sampled at `resolution` corner-aligned points per axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Region3<T> {
    pub min: [T; 3],
    pub max: [T; 3],
    pub resolution: [usize; 3],
}

impl<T: Real> Region3<T> {
    pub fn new(min: [T; 3], max: [T; 3], resolution: [usize; 3]) -> Result<Self> {
        for a in 0..3 {
            if !(min[a].is_finite() && max[a].is_finite()) {
                return Err(Error::InvalidRegion("bounds must be finite"));
            }
            if min[a] >= max[a] {
                return Err(Error::InvalidRegion("min must be below max on every axis"));
            }
            if resolution[a] < 2 {
                return Err(Error::InvalidRegion("resolution must be at least 2 on every axis"));
            }
        }
        Ok(Self { min, max, resolution })
    }

    /// The cube `[lo, hi]³` with `n` samples per axis.
    pub fn cube(lo: T, hi: T, n: usize) -> Result<Self> {
        Self::new([lo; 3], [hi; 3], [n; 3])
    }

    pub fn len(&self) -> usize {
        self.resolution.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Sample spacing along `axis`.
    pub fn step(&self, axis: usize) -> T {
        (self.max[axis] - self.min[axis]) / T::from_count(self.resolution[axis] - 1)
    }

    pub fn coord(&self, axis: usize, i: usize) -> T {
        grid_coord(self.min[axis], self.max[axis], i, self.resolution[axis])
    }

    /// Flat index in x-fastest order.
    pub fn index(&self, ix: usize, iy: usize, iz: usize) -> usize {
        let [nx, ny, _] = self.resolution;
        ix + nx * (iy + ny * iz)
    }
}

/// One of the four quaternion components.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Component {
    R,
    M,
    N,
    P,
}

impl Component {
    pub const ALL: [Component; 4] = [Component::R, Component::M, Component::N, Component::P];

    pub fn name(self) -> &'static str {
        match self {
            Component::R => "r",
            Component::M => "m",
            Component::N => "n",
            Component::P => "p",
        }
    }

    fn slot(self) -> usize {
        match self {
            Component::R => 0,
            Component::M => 1,
            Component::N => 2,
            Component::P => 3,
        }
    }
}

/// Which quaternion components receive the x, y and z coordinates; the
/// remaining component is held at `fixed`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Embedding<T> {
    axes: [Component; 3],
    fixed: T,
}

impl<T: Real> Embedding<T> {
    pub fn new(axes: [Component; 3], fixed: T) -> Result<Self> {
        if axes[0] == axes[1] || axes[0] == axes[2] || axes[1] == axes[2] {
            return Err(Error::InvalidEmbedding("axes must map to three distinct components"));
        }
        if !fixed.is_finite() {
            return Err(Error::InvalidEmbedding("fixed value must be finite"));
        }
        Ok(Self { axes, fixed })
    }

    pub fn axes(&self) -> [Component; 3] {
        self.axes
    }

    pub fn fixed(&self) -> T {
        self.fixed
    }

    /// The component not covered by `axes`.
    pub fn fixed_component(&self) -> Component {
        *Component::ALL.iter().find(|c| !self.axes.contains(c)).expect("three of four")
    }

    /// Places a point of ℝ³ into ℍ.
    pub fn lift(&self, xyz: [T; 3]) -> Quaternion<T> {
        let mut c = [self.fixed; 4];
        for (axis, comp) in self.axes.iter().enumerate() {
            c[comp.slot()] = xyz[axis];
        }
        Quaternion::from(c)
    }

    /// Projects a quaternion back onto the three scan axes.
    pub fn project(&self, q: Quaternion<T>) -> [T; 3] {
        let c = q.to_array();
        self.axes.map(|comp| c[comp.slot()])
    }
}

impl<T: Real> Default for Embedding<T> {
    /// `(x, y, z) → (r, m, n)` with `p = 0`.
    fn default() -> Self {
        Self { axes: [Component::R, Component::M, Component::N], fixed: T::zero() }
    }
}

/// Quaternion seed of grid point `(ix, iy, iz)`.
pub fn embed<T: Real>(region: &Region3<T>, emb: &Embedding<T>, ix: usize, iy: usize, iz: usize) -> Quaternion<T> {
    emb.lift([region.coord(0, ix), region.coord(1, iy), region.coord(2, iz)])
}

/// Per-voxel orbit outcomes of a scanned region, x-fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassificationField<T> {
    pub region: Region3<T>,
    pub embedding: Embedding<T>,
    pub params: ClassifierParams<T>,
    pub outcomes: Vec<QOutcome<T>>,
}

/// Summary counts over a field.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FieldStats {
    pub total: usize,
    pub plotted: usize,
    pub escaped: usize,
    pub converged: usize,
    pub indeterminate: usize,
    pub pole: usize,
    pub mean_steps: f64,
}

impl FieldStats {
    pub fn frac(&self, count: usize) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            count as f64 / self.total as f64
        }
    }
}

impl<T: Real> ClassificationField<T> {
    pub fn get(&self, ix: usize, iy: usize, iz: usize) -> &QOutcome<T> {
        &self.outcomes[self.region.index(ix, iy, iz)]
    }

    pub fn is_plotted(&self, ix: usize, iy: usize, iz: usize) -> bool {
        self.get(ix, iy, iz).is_plotted(&self.params)
    }

    pub fn stats(&self) -> FieldStats {
        let mut s = FieldStats { total: self.outcomes.len(), ..FieldStats::default() };
        let mut steps = 0u64;
        for o in &self.outcomes {
            steps += u64::from(o.steps());
            if o.is_plotted(&self.params) {
                s.plotted += 1;
            }
            match o {
                OrbitOutcome::Escaped { .. } => s.escaped += 1,
                OrbitOutcome::Converged { .. } => s.converged += 1,
                OrbitOutcome::Indeterminate { .. } => s.indeterminate += 1,
                OrbitOutcome::PoleHit { .. } => s.pole += 1,
            }
        }
        if s.total > 0 {
            s.mean_steps = steps as f64 / s.total as f64;
        }
        s
    }

    /// CSV dump with header `ix,iy,iz,outcome,steps`, rows in storage order.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "ix,iy,iz,outcome,steps")?;
        let [nx, ny, nz] = self.region.resolution;
        for iz in 0..nz {
            for iy in 0..ny {
                for ix in 0..nx {
                    let o = self.get(ix, iy, iz);
                    writeln!(out, "{ix},{iy},{iz},{},{}", o.tag_name(), o.steps())?;
                }
            }
        }
        Ok(())
    }

    /// Raw dump: `"QJF1"`, `nx`, `ny`, `nz` as little-endian u32, then one
    /// `(u8 tag, u32 steps)` record per voxel.
    pub fn write_raw<W: Write>(&self, mut out: W) -> io::Result<()> {
        let mut buf = Vec::with_capacity(16 + 5 * self.outcomes.len());
        buf.extend_from_slice(RAW_MAGIC);
        for n in self.region.resolution {
            let n =
                u32::try_from(n).map_err(|_| io::Error::new(io::ErrorKind::InvalidInput, "resolution exceeds u32"))?;
            buf.extend_from_slice(&n.to_le_bytes());
        }
        for o in &self.outcomes {
            buf.push(o.tag());
            buf.extend_from_slice(&o.steps().to_le_bytes());
        }
        out.write_all(&buf)
    }
}

pub const RAW_MAGIC: &[u8; 4] = b"QJF1";

/// Contents of a raw field file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawField {
    pub resolution: [u32; 3],
    /// `(tag, steps)` per voxel, x-fastest.
    pub records: Vec<(u8, u32)>,
}

/// Parses a raw field file written by [`ClassificationField::write_raw`].
pub fn read_raw<R: Read>(mut input: R) -> Result<RawField> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes).map_err(|_| Error::MalformedField("read failed"))?;
    if bytes.len() < 16 || &bytes[..4] != RAW_MAGIC {
        return Err(Error::MalformedField("bad header"));
    }
    let word = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().expect("4 bytes"));
    let resolution = [word(4), word(8), word(12)];
    let count = resolution.iter().map(|&n| n as usize).product::<usize>();
    let body = &bytes[16..];
    if body.len() != 5 * count {
        return Err(Error::MalformedField("record count does not match header"));
    }
    let records =
        body.chunks_exact(5).map(|r| (r[0], u32::from_le_bytes(r[1..5].try_into().expect("4 bytes")))).collect();
    Ok(RawField { resolution, records })
}

/// Classifies every voxel of `region` using `workers` threads.
///
/// Each z-slab is an independent unit of work written into its own slice of
/// the output, so the result is identical for any worker count.
pub fn scan<T: Real>(
    map: &QRationalMap<T>,
    region: &Region3<T>,
    emb: &Embedding<T>,
    params: &ClassifierParams<T>,
    workers: usize,
) -> ClassificationField<T> {
    let [nx, ny, _] = region.resolution;
    let placeholder = OrbitOutcome::PoleHit { steps: 0 };
    let mut outcomes = vec![placeholder; region.len()];
    with_workers(workers, || {
        outcomes.par_chunks_mut(nx * ny).enumerate().for_each(|(iz, slab)| {
            for iy in 0..ny {
                for ix in 0..nx {
                    let seed = embed(region, emb, ix, iy, iz);
                    slab[ix + nx * iy] = classify(map, seed, params);
                }
            }
        });
    });
    ClassificationField { region: *region, embedding: *emb, params: *params, outcomes }
}

/// Successive brackets of a fate-changing segment; see [`refine_bisect`].
#[derive(Clone, Debug)]
pub struct Bisection<'a, T> {
    map: &'a QRationalMap<T>,
    params: &'a ClassifierParams<T>,
    a: Quaternion<T>,
    b: Quaternion<T>,
    fate_a: bool,
}

impl<'a, T: Real> Bisection<'a, T> {
    /// Fails with [`Error::InvalidBracket`] when `a` and `b` share a fate.
    pub fn new(
        map: &'a QRationalMap<T>,
        a: Quaternion<T>,
        b: Quaternion<T>,
        params: &'a ClassifierParams<T>,
    ) -> Result<Self> {
        let fate_a = classify(map, a, params).is_plotted(params);
        let fate_b = classify(map, b, params).is_plotted(params);
        if fate_a == fate_b {
            return Err(Error::InvalidBracket);
        }
        Ok(Self { map, params, a, b, fate_a })
    }

    /// Current endpoints.
    pub fn bracket(&self) -> (Quaternion<T>, Quaternion<T>) {
        (self.a, self.b)
    }

    pub fn midpoint(&self) -> Quaternion<T> {
        (self.a + self.b).scale(T::lit(0.5))
    }

    /// Halves the bracket, keeping the half whose endpoints still differ in fate.
    pub fn step(&mut self) {
        let mid = self.midpoint();
        if classify(self.map, mid, self.params).is_plotted(self.params) == self.fate_a {
            self.a = mid;
        } else {
            self.b = mid;
        }
    }
}

/// Approximates where the fate of the orbits changes along the segment `a b`.
///
/// `a` and `b` must have different plotted fates. After `k` halvings the
/// midpoint of the surviving bracket is returned, so the result lies within
/// `|b - a| / 2^(k+1)` of a fate change.
pub fn refine_bisect<T: Real>(
    map: &QRationalMap<T>,
    a: Quaternion<T>,
    b: Quaternion<T>,
    params: &ClassifierParams<T>,
    k: u32,
) -> Result<Quaternion<T>> {
    let mut bisection = Bisection::new(map, a, b, params)?;
    for _ in 0..k {
        bisection.step();
    }
    Ok(bisection.midpoint())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::QPolynomial;

    type Q = Quaternion<f64>;

    fn square() -> QRationalMap<f64> {
        QRationalMap::quadratic(Q::one(), Q::zero()).unwrap()
    }

    fn newton_cubic() -> QRationalMap<f64> {
        QRationalMap::newton(&QPolynomial::from_real(&[-1.0, 0.0, 0.0, 1.0]).unwrap()).unwrap()
    }

    #[test]
    fn region_validation() {
        assert!(Region3::cube(1.0, -1.0, 3).is_err());
        assert!(Region3::cube(-1.0, 1.0, 1).is_err());
        assert!(Region3::new([0.0, 0.0, f64::NAN], [1.0; 3], [3; 3]).is_err());
        assert_eq!(Region3::cube(-1.0, 1.0, 3).unwrap().len(), 27);
    }

    #[test]
    fn embedding_validation() {
        assert!(Embedding::new([Component::R, Component::R, Component::N], 0.0).is_err());
        let e = Embedding::new([Component::M, Component::N, Component::P], 0.5).unwrap();
        assert_eq!(e.fixed_component(), Component::R);
    }

    #[test]
    fn embed_examples() {
        let region = Region3::cube(-1.0, 1.0, 3).unwrap();
        let def = Embedding::default();
        assert_eq!(embed(&region, &def, 1, 1, 1), Q::zero());
        assert_eq!(embed(&region, &def, 0, 0, 0), Q::new(-1.0, -1.0, -1.0, 0.0));
        let perm = Embedding::new([Component::M, Component::N, Component::P], 0.5).unwrap();
        assert_eq!(embed(&region, &perm, 2, 0, 0), Q::new(0.5, 1.0, -1.0, -1.0));
        assert_eq!(perm.project(embed(&region, &perm, 2, 0, 1)), [1.0, -1.0, 0.0]);
    }

    #[test]
    fn finer_grids_nest_coarser_ones() {
        let coarse = Region3::cube(-2.0, 2.0, 5).unwrap();
        let fine = Region3::cube(-2.0, 2.0, 9).unwrap();
        for i in 0..5 {
            assert_eq!(coarse.coord(0, i), fine.coord(0, 2 * i));
        }
    }

    #[test]
    fn scan_is_total() {
        let map = QRationalMap::quadratic(Q::one(), Q::real(-0.5)).unwrap();
        let params = ClassifierParams::escape_time(2.0, 24).unwrap();
        let region = Region3::cube(-2.0, 2.0, 2).unwrap();
        let field = scan(&map, &region, &Embedding::default(), &params, 2);
        assert_eq!(field.outcomes.len(), 8);
        assert!(field.outcomes.iter().all(|o| o.steps() >= 1));
    }

    #[test]
    fn scan_corner_escapes_immediately() {
        let params = ClassifierParams::escape_time(2.0, 24).unwrap();
        let region = Region3::cube(-2.0, 2.0, 3).unwrap();
        let field = scan(&square(), &region, &Embedding::default(), &params, 1);
        assert_eq!(embed(&region, &Embedding::default(), 2, 2, 2), Q::new(2.0, 2.0, 2.0, 0.0));
        assert_eq!(*field.get(2, 2, 2), OrbitOutcome::Escaped { steps: 1 });
    }

    #[test]
    fn newton_cutoff_fraction_is_proper() {
        let params = ClassifierParams::cutoff_rate(1e-3, 50, 25).unwrap();
        let region = Region3::cube(-2.0, 2.0, 33).unwrap();
        let emb = Embedding::default();
        let field = scan(&newton_cubic(), &region, &emb, &params, 4);
        // Single-threaded reference computed voxel by voxel.
        let mut plotted = 0usize;
        for iz in 0..33 {
            for iy in 0..33 {
                for ix in 0..33 {
                    let seed = embed(&region, &emb, ix, iy, iz);
                    if classify(&newton_cubic(), seed, &params).is_plotted(&params) {
                        plotted += 1;
                    }
                }
            }
        }
        let stats = field.stats();
        assert_eq!(stats.plotted, plotted);
        assert!(plotted > 0 && plotted < region.len());
    }

    #[test]
    fn scan_is_independent_of_worker_count() {
        let params = ClassifierParams::cutoff_rate(1e-3, 50, 25).unwrap();
        let region = Region3::new([-2.0, -1.5, -1.0], [2.0, 1.5, 1.0], [21, 17, 13]).unwrap();
        let emb = Embedding::default();
        let one = scan(&newton_cubic(), &region, &emb, &params, 1);
        let many = scan(&newton_cubic(), &region, &emb, &params, 5);
        assert_eq!(one, many);
    }

    #[test]
    fn raw_and_csv_dumps() {
        let params = ClassifierParams::escape_time(2.0, 24).unwrap();
        let region = Region3::new([-2.0; 3], [2.0; 3], [3, 2, 2]).unwrap();
        let field = scan(&square(), &region, &Embedding::default(), &params, 1);

        let mut raw = Vec::new();
        field.write_raw(&mut raw).unwrap();
        assert_eq!(raw.len(), 16 + 5 * 12);
        assert_eq!(&raw[..4], b"QJF1");
        assert_eq!(&raw[4..16], &[3, 0, 0, 0, 2, 0, 0, 0, 2, 0, 0, 0]);
        let parsed = read_raw(raw.as_slice()).unwrap();
        assert_eq!(parsed.resolution, [3, 2, 2]);
        for (rec, o) in parsed.records.iter().zip(&field.outcomes) {
            assert_eq!(*rec, (o.tag(), o.steps()));
        }
        assert!(read_raw(&raw[..20]).is_err());

        let mut csv = Vec::new();
        field.write_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("ix,iy,iz,outcome,steps"));
        assert_eq!(lines.next(), Some("0,0,0,escaped,1"));
        assert_eq!(text.lines().count(), 13);
    }

    #[test]
    fn bisection_finds_unit_sphere() {
        let params = ClassifierParams::escape_time(2.0, 50).unwrap();
        let hit = refine_bisect(&square(), Q::real(0.5), Q::real(1.5), &params, 30).unwrap();
        assert!(hit.distance(Q::one()) < 1e-8);
    }

    #[test]
    fn bisection_guards_and_zero_steps() {
        let params = ClassifierParams::escape_time(2.0, 50).unwrap();
        assert_eq!(refine_bisect(&square(), Q::real(0.2), Q::real(0.5), &params, 10), Err(Error::InvalidBracket));
        let mid = refine_bisect(&square(), Q::real(0.5), Q::real(1.5), &params, 0).unwrap();
        assert_eq!(mid, Q::one());
    }

    #[test]
    fn bisection_keeps_differing_fates() {
        let params = ClassifierParams::cutoff_rate(1e-3, 50, 8).unwrap();
        let map = newton_cubic();
        // Walk a segment until the fate flips to obtain a bracket.
        let (mut a, mut b) = (Q::new(-1.5, 0.9, 0.3, 0.0), Q::zero());
        let plotted = |q| classify(&map, q, &params).is_plotted(&params);
        let fate = plotted(a);
        for i in 1..=400 {
            b = a + Q::new(0.0075, 0.0, 0.0, 0.0).scale(f64::from(i));
            if plotted(b) != fate {
                break;
            }
        }
        assert_ne!(plotted(b), fate, "no fate change found");
        a = b - Q::new(0.0075, 0.0, 0.0, 0.0);
        let mut bis = Bisection::new(&map, a, b, &params).unwrap();
        for _ in 0..40 {
            let (lo, hi) = bis.bracket();
            assert_ne!(plotted(lo), plotted(hi));
            bis.step();
        }
    }
}

//! Integer bookkeeping: parabolic subalgebra dimensions by closed form and by
//! restricted-root counting, the codimension ≤ 2p−2 subgroup table of SO(p),
//! and the orbit-dimension filter for extendable K actions.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ParabolicKind {
    /// Stabilizer of a null line.
    NullLine,
    /// Stabilizer of a maximal isotropic subspace.
    MaxIsotropic,
}

impl std::str::FromStr for ParabolicKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "NullLine" | "null-line" => Ok(ParabolicKind::NullLine),
            "MaxIsotropic" | "max-isotropic" => Ok(ParabolicKind::MaxIsotropic),
            other => Err(Error::BadParameters(format!("unknown parabolic kind {other}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParabolicDims {
    pub kind: ParabolicKind,
    pub p: u32,
    pub q: u32,
    pub dim_m: u64,
    /// Full maximal abelian a, of dimension q.
    pub dim_a: u64,
    /// Positive roots in the span of Θ, with multiplicity.
    pub dim_n_plus_theta: u64,
    /// Positive roots outside the span of Θ, with multiplicity.
    pub dim_n_theta: u64,
    pub dim_p_theta: u64,
    pub codim: u64,
    /// |p_Θ| from the closed-form expression.
    pub closed_form: u64,
}

impl ParabolicDims {
    pub fn agrees(&self) -> bool {
        self.dim_p_theta == self.closed_form
    }
}

/// dim so(p,q).
pub fn algebra_dim(p: u32, q: u32) -> u64 {
    let n = (p + q) as u64;
    n * (n - 1) / 2
}

/// A restricted root Σ c_i f_i of so(p,q), p ≥ q.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RestrictedRoot {
    pub coeffs: Vec<i8>,
    pub multiplicity: u64,
}

impl RestrictedRoot {
    fn is_positive(&self) -> bool {
        self.coeffs.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0)
    }
}

/// ±f_i ± f_j (multiplicity 1) and ±f_i (multiplicity p − q).
pub fn restricted_roots(p: u32, q: u32) -> Vec<RestrictedRoot> {
    let r = q as usize;
    let mut roots = Vec::new();
    for i in 0..r {
        for j in (i + 1)..r {
            for (si, sj) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                let mut c = vec![0i8; r];
                c[i] = si;
                c[j] = sj;
                roots.push(RestrictedRoot { coeffs: c, multiplicity: 1 });
            }
        }
    }
    if p > q {
        for i in 0..r {
            for s in [1, -1] {
                let mut c = vec![0i8; r];
                c[i] = s;
                roots.push(RestrictedRoot { coeffs: c, multiplicity: (p - q) as u64 });
            }
        }
    }
    roots
}

fn in_theta_span(kind: ParabolicKind, root: &RestrictedRoot) -> bool {
    match kind {
        ParabolicKind::NullLine => root.coeffs[0] == 0,
        ParabolicKind::MaxIsotropic => root.coeffs.iter().map(|&c| c as i32).sum::<i32>() == 0,
    }
}

fn closed_form(kind: ParabolicKind, p: u64, q: u64) -> u64 {
    match kind {
        ParabolicKind::NullLine if p == q => 2 * p * p - 3 * p + 2,
        ParabolicKind::NullLine => (p * p + q * q + 2 * p * q + 4 - 3 * p - 3 * q) / 2,
        ParabolicKind::MaxIsotropic => (p * p + 2 * q * q - p) / 2,
    }
}

/// Dimensions of the parabolic subalgebra p_Θ of so(p,q) by root counting,
/// alongside the closed form.
pub fn parabolic_dims(kind: ParabolicKind, p: u32, q: u32) -> Result<ParabolicDims> {
    if p < 3 || q < 3 {
        return Err(Error::BadSignature { p: p as usize, q: q as usize });
    }
    let (p, q) = if p >= q { (p, q) } else { (q, p) };
    let (mut inside, mut outside) = (0, 0);
    for root in restricted_roots(p, q).iter().filter(|r| r.is_positive()) {
        if in_theta_span(kind, root) {
            inside += root.multiplicity;
        } else {
            outside += root.multiplicity;
        }
    }
    let d = (p - q) as u64;
    let dim_m = d * d.saturating_sub(1) / 2;
    let dim_a = q as u64;
    let dim_p_theta = dim_m + dim_a + 2 * inside + outside;
    Ok(ParabolicDims {
        kind,
        p,
        q,
        dim_m,
        dim_a,
        dim_n_plus_theta: inside,
        dim_n_theta: outside,
        dim_p_theta,
        codim: algebra_dim(p, q) - dim_p_theta,
        closed_form: closed_form(kind, p as u64, q as u64),
    })
}

/// dim m + dim a + #roots (with multiplicity) against dim so(p,q).
pub fn root_partition(p: u32, q: u32) -> (u64, u64) {
    let (p, q) = if p >= q { (p, q) } else { (q, p) };
    let d = (p - q) as u64;
    let roots: u64 = restricted_roots(p, q).iter().map(|r| r.multiplicity).sum();
    (d * d.saturating_sub(1) / 2 + q as u64 + roots, algebra_dim(p, q))
}

/// a·p + b.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Affine {
    pub coef: i64,
    pub constant: i64,
}

impl Affine {
    pub const fn new(coef: i64, constant: i64) -> Self {
        Self { coef, constant }
    }

    pub const fn constant(c: i64) -> Self {
        Self { coef: 0, constant: c }
    }

    pub fn at(&self, p: u32) -> i64 {
        self.coef * p as i64 + self.constant
    }
}

impl std::fmt::Display for Affine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match (self.coef, self.constant) {
            (0, c) => write!(f, "{c}"),
            (a, 0) => write!(f, "{}p", if a == 1 { String::new() } else { a.to_string() }),
            (a, c) => {
                let lead = if a == 1 { "p".to_string() } else { format!("{a}p") };
                if c < 0 {
                    write!(f, "{lead}-{}", -c)
                } else {
                    write!(f, "{lead}+{c}")
                }
            }
        }
    }
}

/// Compact factor of an isotropy subgroup H' ≤ SO(p).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Factor {
    SO(Affine),
    U(u32),
    SU(u32),
    Spin7,
    G2,
    /// SO(3) through its irreducible 5-dimensional representation.
    SO3Irreducible,
    Trivial,
}

impl Factor {
    pub fn dim(&self, p: u32) -> i64 {
        match *self {
            Factor::SO(k) => {
                let k = k.at(p);
                k * (k - 1) / 2
            }
            Factor::U(k) => (k * k) as i64,
            Factor::SU(k) => (k * k) as i64 - 1,
            Factor::Spin7 => 21,
            Factor::G2 => 14,
            Factor::SO3Irreducible => 3,
            Factor::Trivial => 0,
        }
    }

    /// Name with SO(k) evaluated at `p` when given.
    fn name(&self, p: Option<u32>) -> String {
        match self {
            Factor::SO(k) => match p {
                Some(p) => format!("SO({})", k.at(p)),
                None => format!("SO({k})"),
            },
            Factor::U(k) => format!("U{k}"),
            Factor::SU(k) => format!("SU{k}"),
            Factor::Spin7 => "Spin(7)".into(),
            Factor::G2 => "G2".into(),
            Factor::SO3Irreducible => "SO(3) irreducible".into(),
            Factor::Trivial => "{1}".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TablePart {
    Top,
    Bottom,
}

/// One row of the subgroup table: H' ≤ SO(p) with its printed orbit dimension
/// and lower q bound, both possibly affine in p.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitRow {
    /// `None` for rows valid for every p.
    pub p: Option<u32>,
    pub subgroup: Vec<Factor>,
    pub printed_dim: Affine,
    pub printed_q_min: Affine,
    pub part: TablePart,
}

/// A row evaluated at a concrete p.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitRowAt {
    pub p: u32,
    pub subgroup_name: String,
    pub dim_orbit: i64,
    pub printed_dim: i64,
    /// dim M ≤ 2p − 1.
    pub dim_bound: i64,
    pub q_range: (i64, i64),
    pub printed_q_range: (i64, i64),
    pub part: TablePart,
}

impl OrbitRowAt {
    pub fn matches_printed(&self) -> bool {
        self.dim_orbit == self.printed_dim && self.q_range == self.printed_q_range
    }
}

impl OrbitRow {
    pub fn subgroup_name(&self) -> String {
        self.name_at(self.p)
    }

    fn name_at(&self, p: Option<u32>) -> String {
        self.subgroup.iter().map(|f| f.name(p)).collect::<Vec<_>>().join(" x ")
    }

    /// The row at `p`, with dim SO(p)/H' recomputed from the subgroup dimensions
    /// and the q range from dim O^p ≤ p + q − 1, 3 ≤ q ≤ p.
    pub fn at(&self, p: u32) -> OrbitRowAt {
        let p = self.p.unwrap_or(p);
        let so_p = (p as i64) * (p as i64 - 1) / 2;
        let dim_orbit = so_p - self.subgroup.iter().map(|f| f.dim(p)).sum::<i64>();
        OrbitRowAt {
            p,
            subgroup_name: self.name_at(Some(p)),
            dim_orbit,
            printed_dim: self.printed_dim.at(p),
            dim_bound: 2 * p as i64 - 1,
            q_range: ((dim_orbit - p as i64 + 1).max(3), p as i64),
            printed_q_range: (self.printed_q_min.at(p).max(3), p as i64),
            part: self.part,
        }
    }
}

fn row(p: Option<u32>, subgroup: &[Factor], dim: Affine, q_min: Affine, part: TablePart) -> OrbitRow {
    OrbitRow { p, subgroup: subgroup.to_vec(), printed_dim: dim, printed_q_min: q_min, part }
}

/// Subgroups H' of SO(p) with dim SO(p)/H' ≤ 2p − 2, as printed: orbit dimension and minimal q.
pub fn table1_rows() -> Vec<OrbitRow> {
    use Factor::*;
    use TablePart::*;
    let c = Affine::constant;
    let so = |coef, constant| SO(Affine::new(coef, constant));
    vec![
        row(None, &[so(1, -2)], Affine::new(2, -3), Affine::new(1, -2), Top),
        row(None, &[so(1, -2), SO(c(2))], Affine::new(2, -4), Affine::new(1, -3), Top),
        row(Some(9), &[Spin7], c(15), c(7), Top),
        row(Some(8), &[G2], c(14), c(7), Top),
        row(Some(8), &[U(4)], c(12), c(5), Top),
        row(Some(8), &[SU(4)], c(13), c(6), Top),
        row(Some(7), &[G2], c(7), c(3), Top),
        row(Some(7), &[U(3)], c(12), c(6), Top),
        row(Some(7), &[SO(c(3)), SO(c(4))], c(12), c(6), Top),
        row(Some(6), &[SO(c(3)), SO(c(3))], c(9), c(4), Top),
        row(Some(6), &[U(3)], c(6), c(3), Top),
        row(Some(6), &[SU(3)], c(7), c(3), Top),
        row(Some(6), &[U(2), U(1)], c(10), c(5), Top),
        row(Some(5), &[U(2)], c(6), c(3), Top),
        row(Some(5), &[SU(2)], c(7), c(3), Top),
        row(Some(5), &[U(1), U(1)], c(8), c(4), Top),
        row(Some(5), &[SO3Irreducible], c(7), c(3), Top),
        row(Some(3), &[Trivial], c(3), c(3), Top),
        row(None, &[so(1, -1)], Affine::new(1, -1), c(3), Bottom),
        row(Some(8), &[Spin7], c(7), c(3), Bottom),
        row(Some(4), &[SU(2)], c(3), c(3), Bottom),
        row(Some(4), &[U(2)], c(2), c(3), Bottom),
    ]
}

/// Every row at its own p, generic rows evaluated at each p in `range`.
pub fn table1_evaluated(range: std::ops::RangeInclusive<u32>) -> Vec<OrbitRowAt> {
    let mut out = Vec::new();
    for r in table1_rows() {
        match r.p {
            Some(p) => out.push(r.at(p)),
            None => out.extend(range.clone().map(|p| r.at(p))),
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FilterVerdict {
    /// dim O^q ≤ (p + q − 1) − dim O^p + δ.
    pub arithmetic: bool,
    /// dim O^p ≤ p + q − 1 and q ≤ p.
    pub ranges: bool,
    pub feasible: bool,
    pub notes: Vec<String>,
}

/// Whether an SO(p)-orbit and SO(q)-orbit of the given dimensions can meet
/// in a (p+q−1)-manifold, with δ = dim of the trivial part of T O^p meeting T O^q.
pub fn dimension_filter(p: u32, q: u32, dim_op: u32, dim_oq: u32, delta_v: u32) -> Result<FilterVerdict> {
    if delta_v > 1 {
        return Err(Error::BadParameters(format!("deltaV = {delta_v} must be 0 or 1")));
    }
    let dim_m = (p + q - 1) as i64;
    let arithmetic = dim_oq as i64 <= dim_m - dim_op as i64 + delta_v as i64;
    let ranges = dim_op as i64 <= dim_m && q <= p;
    let mut notes = Vec::new();
    let mut hard = false;
    if dim_oq == 1 {
        notes.push("excluded: an SO(q)-orbit cannot be 1-dimensional".to_string());
        hard = true;
    }
    if dim_oq == 0 && dim_m - (dim_op as i64) < q as i64 {
        notes.push("excluded: SO(q) cannot fix the point".to_string());
        hard = true;
    }
    if dim_op as i64 + dim_oq as i64 >= dim_m {
        notes.push("flagged: K would act transitively, which does not extend".to_string());
    }
    if (p, q, dim_op, dim_oq) == (4, 4, 2, 2) {
        notes.push("flagged: both orbits SO(4)/U2, the action is not locally effective".to_string());
    }
    Ok(FilterVerdict { arithmetic, ranges, feasible: arithmetic && ranges && !hard, notes })
}

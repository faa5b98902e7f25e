//! Intertwiner spaces `Hom(F, F')`, endomorphism algebras with structure constants,
//! their Jacobson radicals, idempotents, and Krull-Schmidt decomposition of modules.

use std::fmt;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::linalg::{combine, Coordinates, Matrix};
use crate::module_rep::{jordan_block, UnipotentModule};
use crate::poly::Poly;

/// Random elements tried by [`EndAlgebra::find_idempotent`] after the basis sweep.
pub const IDEMPOTENT_SAMPLES: usize = 64;
/// Random vectors tried by [`is_cyclic_over_end`] after the coordinate vectors.
pub const CYCLIC_TRIALS: usize = 32;
pub const DEFAULT_SEED: u64 = 0x5eed;

/// A basis of `{ T : T N_i = N'_i T for all i }`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomSpace {
    domain_dim: usize,
    codomain_dim: usize,
    field: Field,
    basis: Vec<Matrix>,
}

impl HomSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Matrix] {
        &self.basis
    }

    pub fn domain_dim(&self) -> usize {
        self.domain_dim
    }

    pub fn codomain_dim(&self) -> usize {
        self.codomain_dim
    }

    pub fn field(&self) -> Field {
        self.field
    }
}

/// The stacked linear system in the entries of `T` (row-major, `T` is
/// `codomain.dim x domain.dim`) whose kernel is `Hom(domain, codomain)`.
pub fn intertwiner_system(domain: &UnipotentModule, codomain: &UnipotentModule) -> Result<Matrix> {
    if domain.g() != codomain.g() {
        return Err(Error::GMismatch { left: domain.g(), right: codomain.g() });
    }
    if domain.field() != codomain.field() {
        return Err(Error::FieldMismatch { left: domain.field(), right: codomain.field() });
    }
    let field = domain.field();
    let (n, m) = (domain.dim(), codomain.dim());
    let unknowns = m * n;
    let mut system = Matrix::zeros(domain.g() * unknowns, unknowns, field);
    for (i, (a, b)) in domain.operators().iter().zip(codomain.operators()).enumerate() {
        // (T A - B T)[r][c] = sum_k T[r][k] A[k][c] - sum_k B[r][k] T[k][c]
        for r in 0..m {
            for c in 0..n {
                let eq = i * unknowns + r * n + c;
                for k in 0..n {
                    let x = a.get(k, c);
                    if !x.is_zero() {
                        let cur = system.get(eq, r * n + k).clone();
                        system.set(eq, r * n + k, &cur + x);
                    }
                }
                for k in 0..m {
                    let x = b.get(r, k);
                    if !x.is_zero() {
                        let cur = system.get(eq, k * n + c).clone();
                        system.set(eq, k * n + c, &cur - x);
                    }
                }
            }
        }
    }
    Ok(system)
}

pub fn hom_space(domain: &UnipotentModule, codomain: &UnipotentModule) -> Result<HomSpace> {
    let system = intertwiner_system(domain, codomain)?;
    let (n, m) = (domain.dim(), codomain.dim());
    let field = domain.field();
    let basis = if m * n == 0 {
        Vec::new()
    } else {
        system
            .kernel_basis()
            .into_iter()
            .map(|v| Matrix::new(m, n, field, v).expect("kernel vector has m*n entries"))
            .collect()
    };
    Ok(HomSpace { domain_dim: n, codomain_dim: m, field, basis })
}

/// A unital subalgebra of `n x n` matrices with basis, structure constants and
/// (lazily) its Jacobson radical.
#[derive(Debug)]
pub struct EndAlgebra {
    field: Field,
    acting_dim: usize,
    coords: Coordinates,
    /// `structure[i][j][k]`: coefficient of `basis[k]` in `basis[i] * basis[j]`.
    structure: Vec<Vec<Vec<Scalar>>>,
    radical: OnceLock<Result<Radical>>,
}

/// Jacobson radical in coordinates, with the dimensions of its powers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Radical {
    pub basis: Vec<Vec<Scalar>>,
    /// `dim J, dim J², ..., 0`.
    pub power_dims: Vec<usize>,
    /// Least `m` with `J^m = 0`.
    pub index: usize,
}

impl Radical {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementKind {
    Unit,
    Nilpotent,
    Neither,
}

/// Result of the idempotent search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IdempotentSearch {
    /// A nontrivial idempotent, as an operator on the module.
    Found(Matrix),
    /// The algebra is local; only 0 and 1 are idempotent.
    Local,
    /// The algebra is not local but no sampled element split over the base field.
    NonSplit { tried: usize },
}

pub fn end_algebra(module: &UnipotentModule) -> Result<EndAlgebra> {
    if module.dim() == 0 {
        return Err(Error::InvalidArgument("the zero module has no unital endomorphism algebra".into()));
    }
    EndAlgebra::from_basis(hom_space(module, module)?.basis().to_vec())
}

impl EndAlgebra {
    /// Builds the algebra spanned by `basis`, which must be linearly independent,
    /// closed under products and contain the identity. The identity replaces the first
    /// basis element it depends on, so it always sits at index 0.
    pub fn from_basis(basis: Vec<Matrix>) -> Result<EndAlgebra> {
        let first = basis.first().ok_or_else(|| Error::InvalidArgument("empty algebra basis".into()))?;
        let (field, n) = (first.field(), first.rows());
        let identity = Matrix::identity(n, field);
        let given = Coordinates::new(&basis)?;
        let id_coords = given.of(&identity).ok_or_else(|| Error::Inconsistent("identity outside the span".into()))?;
        let drop = id_coords.iter().position(|c| !c.is_zero()).expect("identity is nonzero");
        let mut ordered = vec![identity];
        ordered.extend(basis.into_iter().enumerate().filter(|(i, _)| *i != drop).map(|(_, b)| b));
        let coords = Coordinates::new(&ordered)?;
        let d = ordered.len();
        let mut structure = vec![vec![Vec::new(); d]; d];
        for i in 0..d {
            for j in 0..d {
                let product = &ordered[i] * &ordered[j];
                structure[i][j] = coords
                    .of(&product)
                    .ok_or_else(|| Error::Inconsistent("basis is not closed under products".into()))?;
            }
        }
        Ok(EndAlgebra { field, acting_dim: n, coords, structure, radical: OnceLock::new() })
    }

    pub fn dim(&self) -> usize {
        self.coords.dim()
    }

    pub fn field(&self) -> Field {
        self.field
    }

    /// Size of the matrices the algebra acts by.
    pub fn acting_dim(&self) -> usize {
        self.acting_dim
    }

    pub fn basis(&self) -> &[Matrix] {
        self.coords.basis()
    }

    pub fn structure_constants(&self) -> &[Vec<Vec<Scalar>>] {
        &self.structure
    }

    pub fn coordinates(&self, m: &Matrix) -> Option<Vec<Scalar>> {
        self.coords.of(m)
    }

    pub fn element(&self, coords: &[Scalar]) -> Matrix {
        combine(coords, self.basis())
    }

    /// Product of two elements given in coordinates.
    pub fn multiply(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        let d = self.dim();
        let mut out = vec![self.field.zero(); d];
        for (i, xi) in x.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
            for (j, yj) in y.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
                let w = xi * yj;
                for (k, c) in self.structure[i][j].iter().enumerate() {
                    if !c.is_zero() {
                        out[k] = &out[k] + &(&w * c);
                    }
                }
            }
        }
        out
    }

    /// Left-regular representation: column `j` holds the coordinates of `x * basis[j]`.
    pub fn left_regular(&self, x: &[Scalar]) -> Matrix {
        let d = self.dim();
        let cols: Vec<Vec<Scalar>> = (0..d)
            .map(|j| {
                let mut e = vec![self.field.zero(); d];
                e[j] = self.field.one();
                self.multiply(x, &e)
            })
            .collect();
        Matrix::from_columns(self.field, d, &cols)
    }

    pub fn is_commutative(&self) -> bool {
        let d = self.dim();
        (0..d).all(|i| (i + 1..d).all(|j| self.structure[i][j] == self.structure[j][i]))
    }

    /// Associativity on every basis triple, through the structure constants.
    pub fn is_associative(&self) -> bool {
        let d = self.dim();
        let unit = |i: usize| {
            let mut e = vec![self.field.zero(); d];
            e[i] = self.field.one();
            e
        };
        (0..d).all(|i| {
            (0..d).all(|j| {
                let ij = &self.structure[i][j];
                (0..d).all(|k| {
                    let left = self.multiply(ij, &unit(k));
                    let right = self.multiply(&unit(i), &self.structure[j][k]);
                    left == right
                })
            })
        })
    }

    /// Structure constants re-multiplied against the matrices.
    pub fn structure_matches_products(&self) -> bool {
        let b = self.basis();
        (0..b.len()).all(|i| (0..b.len()).all(|j| self.element(&self.structure[i][j]) == &b[i] * &b[j]))
    }

    pub fn center_dim(&self) -> usize {
        let d = self.dim();
        // x ↦ x b_i - b_i x, stacked over i.
        let mut rows = Vec::with_capacity(d * d);
        for i in 0..d {
            for k in 0..d {
                rows.push((0..d).map(|j| &self.structure[j][i][k] - &self.structure[i][j][k]).collect());
            }
        }
        d - Matrix::from_rows(self.field, rows, d).expect("square rows").rank()
    }

    /// Jacobson radical as the kernel of the trace form `(x, y) ↦ tr(L_x L_y)`.
    pub fn radical(&self) -> Result<&Radical> {
        self.radical.get_or_init(|| self.compute_radical()).as_ref().map_err(Clone::clone)
    }

    fn compute_radical(&self) -> Result<Radical> {
        let d = self.dim();
        if let Field::Prime(p) = self.field {
            if p <= d as u64 {
                return Err(Error::UnsupportedCharacteristic { p, dim: d });
            }
        }
        let c = &self.structure;
        let mut form = Matrix::zeros(d, d, self.field);
        for i in 0..d {
            for j in i..d {
                let mut t = self.field.zero();
                for (a, row) in c[i].iter().enumerate() {
                    for (b, x) in row.iter().enumerate() {
                        let y = &c[j][b][a];
                        if !x.is_zero() && !y.is_zero() {
                            t = &t + &(x * y);
                        }
                    }
                }
                form.set(i, j, t.clone());
                form.set(j, i, t);
            }
        }
        let basis = form.kernel_basis();
        let span_rank =
            |vs: &[Vec<Scalar>]| if vs.is_empty() { 0 } else { Matrix::from_columns(self.field, d, vs).rank() };
        let rad_rank = basis.len();
        // Two-sided ideal.
        for r in &basis {
            for i in 0..d {
                let mut e = vec![self.field.zero(); d];
                e[i] = self.field.one();
                for prod in [self.multiply(&e, r), self.multiply(r, &e)] {
                    let mut ext = basis.clone();
                    ext.push(prod);
                    if span_rank(&ext) != rad_rank {
                        return Err(Error::Inconsistent("trace-form kernel is not an ideal".into()));
                    }
                }
            }
        }
        let mut power = basis.clone();
        let mut power_dims = vec![power.len()];
        let mut index = 1;
        while !power.is_empty() {
            if index > d {
                return Err(Error::Inconsistent("radical is not nilpotent".into()));
            }
            let products: Vec<Vec<Scalar>> = power
                .iter()
                .flat_map(|p| basis.iter().map(move |r| (p, r)))
                .map(|(p, r)| self.multiply(p, r))
                .collect();
            power = independent_subset(self.field, d, &products);
            power_dims.push(power.len());
            index += 1;
        }
        Ok(Radical { basis, power_dims, index })
    }

    /// Local iff `dim A - dim J = 1`; then `A = k·1 ⊕ J` is checked explicitly.
    pub fn is_local(&self) -> Result<bool> {
        let rad = self.radical()?;
        let local = self.dim() - rad.dim() == 1;
        if local {
            let mut with_unit = rad.basis.clone();
            let mut one = vec![self.field.zero(); self.dim()];
            one[0] = self.field.one();
            with_unit.push(one);
            if Matrix::from_columns(self.field, self.dim(), &with_unit).rank() != self.dim() {
                return Err(Error::Inconsistent("identity lies in the radical".into()));
            }
        }
        Ok(local)
    }

    /// Unit, nilpotent or neither, read off the left-regular representation. In a
    /// local algebra every element is a unit or nilpotent.
    pub fn unit_or_nilpotent(&self, x: &[Scalar]) -> Result<ElementKind> {
        let lx = self.left_regular(x);
        let kind = if lx.is_invertible() {
            ElementKind::Unit
        } else if lx.is_nilpotent() {
            ElementKind::Nilpotent
        } else {
            ElementKind::Neither
        };
        if kind == ElementKind::Neither && self.is_local()? {
            return Err(Error::Inconsistent("local algebra element neither unit nor nilpotent".into()));
        }
        Ok(kind)
    }

    /// Searches for a nontrivial idempotent. Candidates are the basis elements, sums of
    /// pairs of them, and then seeded random sparse combinations. The minimal polynomial
    /// of a candidate is made squarefree; a split off rational linear factor gives an
    /// element that is idempotent modulo a nilpotent, lifted by `e ← 3e² − 2e³`.
    pub fn find_idempotent(&self, seed: u64) -> Result<IdempotentSearch> {
        if self.is_local()? {
            return Ok(IdempotentSearch::Local);
        }
        let d = self.dim();
        let mut tried = 0;
        let unit = |i: usize| {
            let mut e = vec![self.field.zero(); d];
            e[i] = self.field.one();
            e
        };
        let mut candidates: Vec<Vec<Scalar>> = (1..d).map(unit).collect();
        for i in 1..d {
            for j in i + 1..d {
                if candidates.len() >= 4 * d + IDEMPOTENT_SAMPLES {
                    break;
                }
                candidates.push(
                    (0..d).map(|k| if k == i || k == j { self.field.one() } else { self.field.zero() }).collect(),
                );
            }
        }
        for x in candidates {
            tried += 1;
            if let Some(e) = self.idempotent_from(&self.element(&x))? {
                return Ok(IdempotentSearch::Found(e));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..IDEMPOTENT_SAMPLES {
            tried += 1;
            let support = rng.gen_range(1..=d.min(4));
            let mut x = vec![self.field.zero(); d];
            for _ in 0..support {
                let i = rng.gen_range(0..d);
                x[i] = self.field.from_i64(rng.gen_range(-10..=10));
            }
            if let Some(e) = self.idempotent_from(&self.element(&x))? {
                return Ok(IdempotentSearch::Found(e));
            }
        }
        Ok(IdempotentSearch::NonSplit { tried })
    }

    fn idempotent_from(&self, x: &Matrix) -> Result<Option<Matrix>> {
        let minimal = x.min_poly();
        let squarefree = squarefree_part(&minimal);
        let Some(root) = squarefree.roots().into_iter().next() else {
            return Ok(None);
        };
        if squarefree.degree() == Some(1) {
            return Ok(None);
        }
        let f1 = Poly::linear(&root);
        let (f2, rem) = squarefree.div_rem(&f1);
        debug_assert!(rem.is_zero());
        let (g, u, _) = f1.ext_gcd(&f2);
        if g.degree() != Some(0) {
            return Ok(None);
        }
        // e ≡ 0 mod f1, e ≡ 1 mod f2
        let e0 = x.eval_poly(&(&u * &f1).rem(&minimal));
        let e = self.lift_idempotent(e0)?;
        if e.is_zero() || e.is_identity() {
            return Err(Error::Inconsistent("lifted idempotent is trivial".into()));
        }
        Ok(Some(e))
    }

    /// Newton iteration `e ← 3e² − 2e³`, which squares the defect `e² − e` each step.
    pub fn lift_idempotent(&self, mut e: Matrix) -> Result<Matrix> {
        let bound = self.acting_dim.max(2);
        let max_steps = (usize::BITS - (bound - 1).leading_zeros()) as usize + 1;
        let three = self.field.from_i64(3);
        let two = self.field.from_i64(2);
        for _ in 0..=max_steps {
            let sq = &e * &e;
            if sq == e {
                return Ok(e);
            }
            let cube = &sq * &e;
            e = &sq.scale(&three) - &cube.scale(&two);
        }
        Err(Error::Inconsistent("idempotent lifting did not converge".into()))
    }
}

fn squarefree_part(p: &Poly) -> Poly {
    let coeffs = p.coeffs();
    let derivative = Poly::new(
        p.field(),
        coeffs.iter().enumerate().skip(1).map(|(i, c)| c * &p.field().from_i64(i as i64)).collect(),
    );
    let g = p.gcd(&derivative);
    if g.is_zero() {
        return p.monic();
    }
    p.div_rem(&g).0.monic()
}

fn independent_subset(field: Field, d: usize, vectors: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let m = Matrix::from_columns(field, d, vectors);
    m.rref().pivots.iter().map(|&c| vectors[c].clone()).collect()
}

pub fn is_indecomposable(module: &UnipotentModule) -> Result<bool> {
    if module.dim() == 0 {
        return Ok(false);
    }
    end_algebra(module)?.is_local()
}

/// Algebra shapes that occur for small indecomposables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Template {
    /// `k[t]/(t^r)`
    TruncatedPoly(usize),
    /// `k[r,s]/(r,s)²`
    TwoVarSquareZero,
    /// `M_n(k)`
    FullMatrix(usize),
    Unknown,
}

impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Template::TruncatedPoly(r) => write!(f, "TruncatedPoly({r})"),
            Template::TwoVarSquareZero => write!(f, "TwoVarSquareZero"),
            Template::FullMatrix(n) => write!(f, "FullMatrix({n})"),
            Template::Unknown => write!(f, "Unknown"),
        }
    }
}

impl Serialize for Template {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Fingerprint {
    pub dim: usize,
    pub commutative: bool,
    pub radical_dim: usize,
    pub radical_index: usize,
    pub radical_power_dims: Vec<usize>,
    /// `dim J - dim J²`, the minimal number of generators of the radical.
    pub radical_generators: usize,
    pub template: Template,
}

pub fn algebra_fingerprint(algebra: &EndAlgebra) -> Result<Fingerprint> {
    let rad = algebra.radical()?;
    let dim = algebra.dim();
    let commutative = algebra.is_commutative();
    let radical_dim = rad.dim();
    let radical_generators = radical_dim - rad.power_dims.get(1).copied().unwrap_or(0);
    let local = algebra.is_local()?;
    let template = if local && commutative && radical_generators <= 1 {
        // A local algebra whose radical is generated by one element t is k[t]/(t^dim).
        Template::TruncatedPoly(dim)
    } else if local && commutative && radical_dim == 2 && rad.index == 2 && radical_generators == 2 {
        Template::TwoVarSquareZero
    } else if radical_dim == 0 && algebra.center_dim() == 1 && is_square(dim) {
        Template::FullMatrix(dim.isqrt())
    } else {
        Template::Unknown
    };
    Ok(Fingerprint {
        dim,
        commutative,
        radical_dim,
        radical_index: rad.index,
        radical_power_dims: rad.power_dims.clone(),
        radical_generators,
        template,
    })
}

fn is_square(n: usize) -> bool {
    let r = n.isqrt();
    r * r == n
}

/// Whether some `v` generates the module over `End(F)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cyclicity {
    pub cyclic: bool,
    pub witness: Option<Vec<Scalar>>,
    pub end_dim: usize,
    pub module_dim: usize,
    /// Cyclic with `dim End(F) = dim F`: the fiber of `End` is a copy of the module.
    pub fiber_model_matches: bool,
}

pub fn is_cyclic_over_end(module: &UnipotentModule, seed: u64) -> Result<Cyclicity> {
    let n = module.dim();
    let field = module.field();
    let end = hom_space(module, module)?;
    let generates = |v: &[Scalar]| {
        let images: Vec<Vec<Scalar>> = end.basis().iter().map(|t| t.mul_vec(v)).collect();
        !images.is_empty() && Matrix::from_columns(field, n, &images).rank() == n
    };
    let mut candidates: Vec<Vec<Scalar>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { field.one() } else { field.zero() }).collect()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..CYCLIC_TRIALS {
        candidates.push((0..n).map(|_| field.from_i64(rng.gen_range(-10..=10))).collect());
    }
    let witness = if n == 0 { None } else { candidates.into_iter().find(|v| generates(v)) };
    let cyclic = witness.is_some();
    Ok(Cyclicity { cyclic, witness, end_dim: end.dim(), module_dim: n, fiber_model_matches: cyclic && end.dim() == n })
}

/// Krull-Schmidt decomposition of a module.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    /// Factors ordered by decreasing dimension, then by their operator text.
    pub factors: Vec<UnipotentModule>,
    /// Invertible `W` with `N_i W = W (⊕ factor operators)`.
    pub witness: Matrix,
    /// False when some factor is not local but no idempotent splitting it was found
    /// over the base field; those factors are listed in `unsplit`.
    pub complete: bool,
    pub unsplit: Vec<usize>,
}

pub fn decompose_module(module: &UnipotentModule, seed: u64) -> Result<Decomposition> {
    let field = module.field();
    let mut pieces: Vec<(UnipotentModule, Matrix, bool)> = Vec::new();
    if module.dim() == 0 {
        // empty decomposition
    } else if module.g() == 1 {
        let (partition, basis) = module.jordan_basis()?;
        let mut offset = 0;
        for &r in partition.parts() {
            let cols: Vec<Vec<Scalar>> = (offset..offset + r).map(|c| basis.column(c)).collect();
            pieces.push((UnipotentModule::jordan(r, field)?, Matrix::from_columns(field, module.dim(), &cols), true));
            offset += r;
        }
    } else {
        split(module, &Matrix::identity(module.dim(), field), seed, &mut pieces)?;
    }
    let mut order: Vec<usize> = (0..pieces.len()).collect();
    let keys: Vec<String> = pieces.iter().map(|(m, _, _)| m.sort_key()).collect();
    order.sort_by(|&a, &b| pieces[b].0.dim().cmp(&pieces[a].0.dim()).then_with(|| keys[a].cmp(&keys[b])));
    let mut factors = Vec::new();
    let mut columns = Vec::new();
    let mut unsplit = Vec::new();
    for (pos, &i) in order.iter().enumerate() {
        let (m, basis, ok) = &pieces[i];
        factors.push(m.clone());
        columns.extend((0..basis.cols()).map(|c| basis.column(c)));
        if !ok {
            unsplit.push(pos);
        }
    }
    let witness = Matrix::from_columns(field, module.dim(), &columns);
    let decomposition = Decomposition { factors, witness, complete: unsplit.is_empty(), unsplit };
    if !decomposition.witness_holds(module) {
        return Err(Error::Inconsistent("decomposition witness fails".into()));
    }
    Ok(decomposition)
}

fn split(
    module: &UnipotentModule,
    embedding: &Matrix,
    seed: u64,
    out: &mut Vec<(UnipotentModule, Matrix, bool)>,
) -> Result<()> {
    let algebra = end_algebra(module)?;
    match algebra.find_idempotent(seed)? {
        IdempotentSearch::Local => out.push((module.clone(), embedding.clone(), true)),
        IdempotentSearch::NonSplit { .. } => out.push((module.clone(), embedding.clone(), false)),
        IdempotentSearch::Found(e) => {
            let image = e.column_space();
            let kernel = Matrix::from_columns(module.field(), module.dim(), &e.kernel_basis());
            for part in [image, kernel] {
                let sub = module.restrict(&part)?;
                split(&sub, &(embedding * &part), seed, out)?;
            }
        }
    }
    Ok(())
}

impl Decomposition {
    /// `W` invertible and `N_i W = W D_i` with `D_i` block diagonal from the factors.
    pub fn witness_holds(&self, module: &UnipotentModule) -> bool {
        if module.dim() == 0 {
            return self.factors.is_empty();
        }
        if !self.witness.is_invertible() {
            return false;
        }
        (0..module.g()).all(|i| {
            let block = self
                .factors
                .iter()
                .map(|f| f.operators()[i].clone())
                .reduce(|a, b| a.direct_sum(&b))
                .expect("nonempty");
            &module.operators()[i] * &self.witness == &self.witness * &block
        })
    }
}

/// Convenience: `End(F_r)` has basis `1, N, ..., N^{r-1}`.
pub fn truncated_poly_basis(r: usize, field: Field) -> Vec<Matrix> {
    let j = jordan_block(r, field);
    (0..r).map(|k| j.pow(k)).collect()
}

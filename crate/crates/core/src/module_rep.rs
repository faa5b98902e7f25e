//! Unipotent bundles in their module model: a finite-dimensional space with `g`
//! pairwise-commuting nilpotent operators (a finite-length module over the local ring
//! `k[[x_1, ..., x_g]]` at the origin of the dual abelian variety).

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::hom_algebra::hom_space;
use crate::linalg::{combine, Matrix, SpanBuilder};

/// Number of random Hom combinations tried before an isomorphism test gives up.
pub const ISO_TRIALS: usize = 32;
/// Random coefficients are drawn from `-ISO_COEFF_RANGE..=ISO_COEFF_RANGE`.
pub const ISO_COEFF_RANGE: i64 = 10;

#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct UnipotentModule {
    g: usize,
    dim: usize,
    #[serde(skip)]
    field: Field,
    operators: Vec<Matrix>,
}

impl UnipotentModule {
    /// Validates `g` square operators of equal size: pairwise commuting and nilpotent.
    pub fn new(g: usize, operators: Vec<Matrix>) -> Result<UnipotentModule> {
        if g == 0 {
            return Err(Error::InvalidArgument("a module needs g >= 1 operators".into()));
        }
        if operators.len() != g {
            return Err(Error::InvalidArgument(format!("expected {g} operators, got {}", operators.len())));
        }
        let dim = operators[0].rows();
        let field = operators[0].field();
        for (i, op) in operators.iter().enumerate() {
            if !op.is_square() || op.rows() != dim {
                return Err(Error::Dimension(format!(
                    "operator {i} is {}x{}, expected {dim}x{dim}",
                    op.rows(),
                    op.cols()
                )));
            }
            if op.field() != field {
                return Err(Error::FieldMismatch { left: field, right: op.field() });
            }
        }
        for i in 0..g {
            for j in i + 1..g {
                if &operators[i] * &operators[j] != &operators[j] * &operators[i] {
                    return Err(Error::NotCommuting { i, j });
                }
            }
        }
        if let Some(index) = operators.iter().position(|op| !op.is_nilpotent()) {
            return Err(Error::OperatorNotNilpotent { index });
        }
        Ok(UnipotentModule { g, dim, field, operators })
    }

    /// All operators zero: the trivial bundle of rank `dim`.
    pub fn trivial(g: usize, dim: usize, field: Field) -> UnipotentModule {
        let operators = vec![Matrix::zeros(dim, dim, field); g.max(1)];
        UnipotentModule { g: g.max(1), dim, field, operators }
    }

    /// `F_r` for `g = 1`: a single nilpotent Jordan block of size `r`.
    pub fn jordan(r: usize, field: Field) -> Result<UnipotentModule> {
        UnipotentModule::jordan_in(1, r, field)
    }

    /// `k[x_1]/(x_1^r)` over `g` variables: first operator a Jordan block, the rest zero.
    pub fn jordan_in(g: usize, r: usize, field: Field) -> Result<UnipotentModule> {
        if r == 0 {
            return Err(Error::InvalidArgument("Jordan block size must be at least 1".into()));
        }
        if g == 0 {
            return Err(Error::InvalidArgument("a module needs g >= 1 operators".into()));
        }
        let mut ops = vec![Matrix::zeros(r, r, field); g];
        ops[0] = jordan_block(r, field);
        Ok(UnipotentModule { g, dim: r, field, operators: ops })
    }

    /// Cyclic module `k[x_1..x_g]/I` for a monomial ideal `I` given by generator
    /// exponent vectors. The basis is the standard monomials, ordered by degree and then
    /// lexicographically with `x_1 > x_2 > ...`; operator `i` multiplies by `x_i`.
    pub fn from_monomial_ideal(g: usize, generators: &[Vec<u32>], field: Field) -> Result<UnipotentModule> {
        if g == 0 {
            return Err(Error::InvalidArgument("a module needs g >= 1 operators".into()));
        }
        if let Some(bad) = generators.iter().find(|e| e.len() != g) {
            return Err(Error::InvalidArgument(format!("exponent vector of length {} for g = {g}", bad.len())));
        }
        let divides = |gen: &[u32], m: &[u32]| gen.iter().zip(m).all(|(a, b)| a <= b);
        let mut bounds = Vec::with_capacity(g);
        for var in 0..g {
            let pure = generators
                .iter()
                .filter(|e| e.iter().enumerate().all(|(j, &x)| j == var || x == 0))
                .map(|e| e[var])
                .min();
            match pure {
                Some(a) => bounds.push(a),
                None => return Err(Error::InfiniteColength { variable: var }),
            }
        }
        let mut monomials: Vec<Vec<u32>> = vec![Vec::new()];
        for &b in &bounds {
            monomials = monomials
                .into_iter()
                .flat_map(|m| {
                    (0..b).map(move |x| {
                        let mut m = m.clone();
                        m.push(x);
                        m
                    })
                })
                .collect();
        }
        monomials.retain(|m| !generators.iter().any(|gen| divides(gen, m)));
        monomials.sort_by(|a, b| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            da.cmp(&db).then_with(|| b.cmp(a))
        });
        let dim = monomials.len();
        let operators = (0..g)
            .map(|var| {
                let mut op = Matrix::zeros(dim, dim, field);
                for (col, m) in monomials.iter().enumerate() {
                    let mut next = m.clone();
                    next[var] += 1;
                    if let Some(row) = monomials.iter().position(|x| *x == next) {
                        op.set(row, col, field.one());
                    }
                }
                op
            })
            .collect();
        Ok(UnipotentModule { g, dim, field, operators })
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn operators(&self) -> &[Matrix] {
        &self.operators
    }

    pub fn is_trivial(&self) -> bool {
        self.operators.iter().all(Matrix::is_zero)
    }

    fn same_g(&self, other: &UnipotentModule) -> Result<()> {
        if self.g != other.g {
            return Err(Error::GMismatch { left: self.g, right: other.g });
        }
        if self.field != other.field {
            return Err(Error::FieldMismatch { left: self.field, right: other.field });
        }
        Ok(())
    }

    /// Block-diagonal operators.
    pub fn direct_sum(&self, other: &UnipotentModule) -> Result<UnipotentModule> {
        self.same_g(other)?;
        let operators = self.operators.iter().zip(&other.operators).map(|(a, b)| a.direct_sum(b)).collect();
        Ok(UnipotentModule { g: self.g, dim: self.dim + other.dim, field: self.field, operators })
    }

    /// Leibniz action `N_i ⊗ 1 + 1 ⊗ N'_i`.
    pub fn tensor(&self, other: &UnipotentModule) -> Result<UnipotentModule> {
        self.same_g(other)?;
        let id_a = Matrix::identity(self.dim, self.field);
        let id_b = Matrix::identity(other.dim, self.field);
        let operators =
            self.operators.iter().zip(&other.operators).map(|(a, b)| &a.kron(&id_b) + &id_a.kron(b)).collect();
        Ok(UnipotentModule { g: self.g, dim: self.dim * other.dim, field: self.field, operators })
    }

    /// Transposed operators.
    pub fn dual(&self) -> UnipotentModule {
        UnipotentModule { operators: self.operators.iter().map(Matrix::transpose).collect(), ..self.clone() }
    }

    /// Operators `P N_i P^{-1}`.
    pub fn conjugate(&self, p: &Matrix) -> Result<UnipotentModule> {
        let inv = p.inverse().ok_or_else(|| Error::InvalidArgument("change of basis is singular".into()))?;
        let operators = self.operators.iter().map(|n| &(p * n) * &inv).collect();
        Ok(UnipotentModule { operators, ..self.clone() })
    }

    /// Submodule spanned by the columns of `basis` (which must be independent and
    /// invariant), with operators written in that basis.
    pub fn restrict(&self, basis: &Matrix) -> Result<UnipotentModule> {
        let k = basis.cols();
        let operators = self
            .operators
            .iter()
            .map(|n| {
                if k == 0 {
                    return Ok(Matrix::zeros(0, 0, self.field));
                }
                basis
                    .solve_matrix(&(n * basis))
                    .ok_or_else(|| Error::InvalidArgument("subspace is not invariant".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(UnipotentModule { g: self.g, dim: k, field: self.field, operators })
    }

    /// `dim ∩ ker N_i`, the dimension of `Hom(O, F)`.
    pub fn global_sections_dim(&self) -> usize {
        if self.dim == 0 {
            return 0;
        }
        let refs: Vec<&Matrix> = self.operators.iter().collect();
        self.dim - Matrix::vstack(&refs).rank()
    }

    /// `n - dim Σ im N_i`, the dimension of `Hom(F, O)`.
    pub fn cosections_dim(&self) -> usize {
        if self.dim == 0 {
            return 0;
        }
        let refs: Vec<&Matrix> = self.operators.iter().collect();
        self.dim - Matrix::hstack(&refs).rank()
    }

    /// `F ⊇ m F ⊇ m² F ⊇ ... ⊇ 0` for the maximal ideal `m = (x_1, ..., x_g)`.
    pub fn radical_series(&self) -> Flag {
        let mut steps = vec![Matrix::identity(self.dim, self.field)];
        while steps.last().is_some_and(|s| s.cols() > 0) {
            let last = steps.last().expect("nonempty");
            let images: Vec<Matrix> = self.operators.iter().map(|n| n * last).collect();
            let refs: Vec<&Matrix> = images.iter().collect();
            steps.push(Matrix::hstack(&refs).column_space());
        }
        Flag { steps }
    }

    /// `0 ⊆ soc F ⊆ soc² F ⊆ ... ⊆ F`, where `soc^{k+1} = { v : N_i v ∈ soc^k }`.
    pub fn socle_series(&self) -> Flag {
        let n = self.dim;
        let mut steps = vec![Matrix::zeros(n, 0, self.field)];
        let mut constraints = Matrix::identity(n, self.field);
        while steps.last().is_some_and(|s| s.cols() < n) {
            let stacked: Vec<Matrix> = self.operators.iter().map(|op| &constraints * op).collect();
            let refs: Vec<&Matrix> = stacked.iter().collect();
            let next = Matrix::vstack(&refs);
            let kernel = next.kernel_basis();
            steps.push(Matrix::from_columns(self.field, n, &kernel));
            let reduced = next.rref();
            let rows: Vec<Vec<Scalar>> = (0..reduced.rank).map(|r| reduced.reduced.row(r).to_vec()).collect();
            constraints = Matrix::from_rows(self.field, rows, n).expect("consistent widths");
        }
        Flag { steps }
    }

    /// Jordan type for `g = 1`.
    pub fn partition(&self) -> Result<Partition> {
        if self.g != 1 {
            return Err(Error::RequiresCurve(self.g));
        }
        let n = &self.operators[0];
        let mut ranks = vec![self.dim];
        let mut power = Matrix::identity(self.dim, self.field);
        while *ranks.last().expect("nonempty") > 0 {
            power = &power * n;
            ranks.push(power.rank());
        }
        // ranks[k-1] - ranks[k] parts have size >= k.
        let at_least: Vec<usize> = ranks.windows(2).map(|w| w[0] - w[1]).collect();
        let mut parts = Vec::new();
        for (k, &count) in at_least.iter().enumerate() {
            let next = at_least.get(k + 1).copied().unwrap_or(0);
            parts.extend(std::iter::repeat_n(k + 1, count - next));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition::new(parts)
    }

    /// Columns forming a Jordan basis for `g = 1`: `P^{-1} N P` is the direct sum of
    /// upper Jordan blocks of sizes given by the partition, largest first.
    pub fn jordan_basis(&self) -> Result<(Partition, Matrix)> {
        if self.g != 1 {
            return Err(Error::RequiresCurve(self.g));
        }
        let n = &self.operators[0];
        let field = self.field;
        let dim = self.dim;
        let index = n.nilpotency_index()?;
        let kernels: Vec<Vec<Vec<Scalar>>> = (0..=index).map(|k| n.pow(k).kernel_basis()).collect();
        // (top vector, chain length)
        let mut tops: Vec<(Vec<Scalar>, usize)> = Vec::new();
        for k in (1..=index).rev() {
            let mut span = SpanBuilder::new();
            for v in &kernels[k - 1] {
                span.insert(v);
            }
            for (v, len) in &tops {
                span.insert(&n.pow(len - k).mul_vec(v));
            }
            for cand in &kernels[k] {
                if span.insert(cand) {
                    tops.push((cand.clone(), k));
                }
            }
        }
        let mut columns = Vec::with_capacity(dim);
        for (v, len) in &tops {
            for j in (0..*len).rev() {
                columns.push(n.pow(j).mul_vec(v));
            }
        }
        let partition = Partition::new(tops.iter().map(|(_, len)| *len).collect())?;
        Ok((partition, Matrix::from_columns(field, dim, &columns)))
    }

    /// Stable text key used to order factors deterministically.
    pub fn sort_key(&self) -> String {
        self.operators.iter().map(ToString::to_string).collect::<Vec<_>>().join(";")
    }
}

pub fn jordan_block(r: usize, field: Field) -> Matrix {
    let mut j = Matrix::zeros(r, r, field);
    for i in 0..r.saturating_sub(1) {
        j.set(i, i + 1, field.one());
    }
    j
}

impl fmt::Debug for UnipotentModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UnipotentModule(g={}, dim={}, {})", self.g, self.dim, self.sort_key())
    }
}

/// A chain of subspaces, each given by a matrix whose columns form a basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Flag {
    pub steps: Vec<Matrix>,
}

impl Flag {
    pub fn dims(&self) -> Vec<usize> {
        self.steps.iter().map(Matrix::cols).collect()
    }

    /// Every operator maps each step into the adjacent smaller one, so successive
    /// quotients carry the zero action.
    pub fn has_trivial_quotients(&self, module: &UnipotentModule) -> bool {
        self.steps.windows(2).all(|w| {
            let (big, small) = if w[0].cols() >= w[1].cols() { (&w[0], &w[1]) } else { (&w[1], &w[0]) };
            module.operators().iter().all(|n| {
                let image = n * big;
                if small.cols() == 0 {
                    return image.is_zero();
                }
                Matrix::hstack(&[small, &image]).rank() == small.cols()
            })
        })
    }
}

/// Weakly decreasing sequence of positive integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Partition(Vec<usize>);

impl Partition {
    pub fn new(parts: Vec<usize>) -> Result<Partition> {
        if parts.contains(&0) {
            return Err(Error::InvalidArgument("partition parts must be positive".into()));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument("partition parts must be weakly decreasing".into()));
        }
        Ok(Partition(parts))
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn size(&self) -> usize {
        self.0.iter().sum()
    }

    /// Merge-sorted union of parts.
    pub fn merge(&self, other: &Partition) -> Partition {
        let mut parts: Vec<usize> = self.0.iter().chain(&other.0).copied().collect();
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition(parts)
    }

    /// All partitions of `n` in reverse lexicographic order: `(n)` first, `(1,…,1)` last.
    pub fn all(n: usize) -> Vec<Partition> {
        fn go(n: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Partition>) {
            if n == 0 {
                out.push(Partition(prefix.clone()));
                return;
            }
            for part in (1..=n.min(max)).rev() {
                prefix.push(part);
                go(n - part, part, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        go(n, n, &mut Vec::new(), &mut out);
        out
    }

    /// Direct sum of Jordan blocks, largest first.
    pub fn module(&self, field: Field) -> UnipotentModule {
        self.0
            .iter()
            .map(|&r| UnipotentModule::jordan(r, field).expect("positive part"))
            .reduce(|a, b| a.direct_sum(&b).expect("same g"))
            .unwrap_or_else(|| UnipotentModule::trivial(1, 0, field))
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Outcome of an isomorphism test. `Undecided` only arises for `g ≥ 2`, after the
/// random search for an invertible intertwiner failed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Isomorphism {
    /// Invertible `T` with `T N_i = N'_i T`.
    Yes(Matrix),
    No(String),
    Undecided,
}

impl Isomorphism {
    pub fn is_yes(&self) -> bool {
        matches!(self, Isomorphism::Yes(_))
    }
}

/// Isomorphism test. Exact for `g = 1` (Jordan types); for `g ≥ 2` it runs dimension
/// prechecks on Hom spaces and then a seeded search over random combinations of a Hom
/// basis. A "no" is only ever returned from a precheck.
pub fn modules_isomorphic(a: &UnipotentModule, b: &UnipotentModule, seed: u64) -> Result<Isomorphism> {
    a.same_g(b)?;
    if a.dim != b.dim {
        return Ok(Isomorphism::No(format!("dimensions differ ({} vs {})", a.dim, b.dim)));
    }
    if a.dim == 0 {
        return Ok(Isomorphism::Yes(Matrix::zeros(0, 0, a.field)));
    }
    if a.g == 1 {
        let (pa, basis_a) = a.jordan_basis()?;
        let (pb, basis_b) = b.jordan_basis()?;
        if pa != pb {
            return Ok(Isomorphism::No(format!("Jordan types differ: {pa} vs {pb}")));
        }
        let inv = basis_a.inverse().ok_or_else(|| Error::Inconsistent("singular Jordan basis".into()))?;
        let witness = &basis_b * &inv;
        return Ok(Isomorphism::Yes(witness));
    }
    let forward = hom_space(a, b)?;
    let backward = hom_space(b, a)?;
    let end_a = hom_space(a, a)?.dim();
    let end_b = hom_space(b, b)?.dim();
    let dims = [forward.dim(), backward.dim(), end_a, end_b];
    if dims.iter().any(|&d| d != end_a) {
        return Ok(Isomorphism::No(format!(
            "Hom dimensions differ: Hom(F,F')={}, Hom(F',F)={}, End(F)={}, End(F')={}",
            dims[0], dims[1], dims[2], dims[3]
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let basis = forward.basis();
    for _ in 0..ISO_TRIALS {
        let coeffs: Vec<Scalar> =
            basis.iter().map(|_| a.field.from_i64(rng.gen_range(-ISO_COEFF_RANGE..=ISO_COEFF_RANGE))).collect();
        let t = combine(&coeffs, basis);
        if t.is_invertible() {
            return Ok(Isomorphism::Yes(t));
        }
    }
    Ok(Isomorphism::Undecided)
}

/// Checks that `t` is an invertible intertwiner from `a` to `b`.
pub fn is_isomorphism_witness(a: &UnipotentModule, b: &UnipotentModule, t: &Matrix) -> bool {
    t.is_invertible() && t.rows() == b.dim && a.operators.iter().zip(&b.operators).all(|(na, nb)| t * na == nb * t)
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: Field = Field::Rational;

    fn f(r: usize) -> UnipotentModule {
        UnipotentModule::jordan(r, Q).unwrap()
    }

    fn xy_squared() -> UnipotentModule {
        UnipotentModule::from_monomial_ideal(2, &[vec![2, 0], vec![1, 1], vec![0, 2]], Q).unwrap()
    }

    #[test]
    fn make_module_examples() {
        assert_eq!(UnipotentModule::new(1, vec![jordan_block(2, Q)]).unwrap().dim(), 2);
        let e13 = Matrix::unit(3, 0, 2, Q);
        let e23 = Matrix::unit(3, 1, 2, Q);
        // E13 E23 = E23 E13 = 0
        assert!((&e13 * &e23).is_zero() && (&e23 * &e13).is_zero());
        assert!(UnipotentModule::new(2, vec![e13, e23]).is_ok());
        assert_eq!(
            UnipotentModule::new(1, vec![Matrix::identity(2, Q)]),
            Err(Error::OperatorNotNilpotent { index: 0 })
        );
        let err = UnipotentModule::new(2, vec![Matrix::unit(2, 0, 1, Q), Matrix::unit(2, 1, 0, Q)]);
        assert_eq!(err, Err(Error::NotCommuting { i: 0, j: 1 }));
    }

    #[test]
    fn jordan_modules() {
        assert!(f(1).operators()[0].is_zero());
        assert_eq!(f(3).operators()[0].nilpotency_index(), Ok(3));
        assert!(UnipotentModule::jordan(0, Q).is_err());
    }

    #[test]
    fn monomial_modules() {
        let m = xy_squared();
        assert_eq!(m.dim(), 3);
        // basis 1, x, y
        assert_eq!(m.operators()[0], Matrix::unit(3, 1, 0, Q));
        assert_eq!(m.operators()[1], Matrix::unit(3, 2, 0, Q));

        let cubic = UnipotentModule::from_monomial_ideal(1, &[vec![3]], Q).unwrap();
        assert_eq!(cubic.partition().unwrap(), Partition(vec![3]));
        // (x^2, y): standard monomials {1, x}
        let m = UnipotentModule::from_monomial_ideal(2, &[vec![2, 0], vec![0, 1]], Q).unwrap();
        assert_eq!(m.dim(), 2);
        assert!(m.operators()[1].is_zero());
        assert_eq!(m.operators()[0].nilpotency_index(), Ok(2));

        assert_eq!(
            UnipotentModule::from_monomial_ideal(2, &[vec![2, 0], vec![1, 1]], Q),
            Err(Error::InfiniteColength { variable: 1 })
        );
    }

    #[test]
    fn constructors() {
        let s = f(2).direct_sum(&f(1)).unwrap();
        assert_eq!((s.dim(), s.operators()[0].rank()), (3, 1));
        let t = f(2).tensor(&f(2)).unwrap();
        assert_eq!(t.dim(), 4);
        assert_eq!(t.operators()[0].nilpotency_index(), Ok(3));
        assert!(modules_isomorphic(&f(3).dual(), &f(3), 0).unwrap().is_yes());
        assert!(f(2).direct_sum(&xy_squared()).is_err());
    }

    #[test]
    fn sections() {
        for r in 1..6 {
            assert_eq!(f(r).global_sections_dim(), 1);
            assert_eq!(f(r).cosections_dim(), 1);
        }
        assert_eq!(f(2).direct_sum(&f(3)).unwrap().global_sections_dim(), 2);
        assert_eq!(UnipotentModule::trivial(2, 4, Q).global_sections_dim(), 4);
        assert_eq!(xy_squared().global_sections_dim(), 2);
        assert_eq!(xy_squared().cosections_dim(), 1);
    }

    #[test]
    fn series() {
        assert_eq!(f(3).radical_series().dims(), vec![3, 2, 1, 0]);
        assert_eq!(f(3).socle_series().dims(), vec![0, 1, 2, 3]);
        let t = UnipotentModule::trivial(1, 2, Q);
        assert_eq!(t.radical_series().dims(), vec![2, 0]);
        assert_eq!(t.socle_series().dims(), vec![0, 2]);
        let m = xy_squared();
        assert_eq!(m.radical_series().dims(), vec![3, 2, 0]);
        assert_eq!(m.socle_series().dims(), vec![0, 2, 3]);
        assert!(m.radical_series().has_trivial_quotients(&m));
        assert!(m.socle_series().has_trivial_quotients(&m));
        assert!(f(4).radical_series().has_trivial_quotients(&f(4)));
    }

    #[test]
    fn partitions() {
        assert_eq!(f(2).direct_sum(&f(1)).unwrap().partition().unwrap(), Partition(vec![2, 1]));
        assert_eq!(f(4).partition().unwrap(), Partition(vec![4]));
        assert_eq!(UnipotentModule::trivial(1, 3, Q).partition().unwrap(), Partition(vec![1, 1, 1]));
        assert_eq!(xy_squared().partition(), Err(Error::RequiresCurve(2)));
        let names: Vec<String> = Partition::all(4).iter().map(ToString::to_string).collect();
        assert_eq!(names, ["(4)", "(3,1)", "(2,2)", "(2,1,1)", "(1,1,1,1)"]);
        assert!(Partition::new(vec![1, 2]).is_err());
    }

    #[test]
    fn jordan_basis_conjugates_to_blocks() {
        let p = Matrix::from_i64(Q, &[vec![1, 2, 0, 1], vec![0, 1, 1, 0], vec![1, 0, 1, 1], vec![0, 0, 1, 2]]);
        let m = f(3).direct_sum(&f(1)).unwrap().conjugate(&p).unwrap();
        let (part, basis) = m.jordan_basis().unwrap();
        assert_eq!(part, Partition(vec![3, 1]));
        let expected = jordan_block(3, Q).direct_sum(&jordan_block(1, Q));
        assert_eq!(&m.operators()[0] * &basis, &basis * &expected);
        assert!(basis.is_invertible());
    }

    #[test]
    fn isomorphism_examples() {
        let a = f(2).direct_sum(&f(1)).unwrap();
        assert!(matches!(modules_isomorphic(&a, &f(3), 1).unwrap(), Isomorphism::No(_)));
        match modules_isomorphic(&a, &a, 1).unwrap() {
            Isomorphism::Yes(t) => assert!(is_isomorphism_witness(&a, &a, &t)),
            other => panic!("{other:?}"),
        }
        let m = xy_squared();
        let p = Matrix::from_i64(Q, &[vec![2, 1, 0], vec![1, 1, 3], vec![0, -1, 1]]);
        let c = m.conjugate(&p).unwrap();
        match modules_isomorphic(&m, &c, 7).unwrap() {
            Isomorphism::Yes(t) => assert!(is_isomorphism_witness(&m, &c, &t)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(modules_isomorphic(&m, &m.dual(), 7).unwrap(), Isomorphism::No(_)));
    }
}

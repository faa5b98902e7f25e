//! Enumeration of `g = 1` modules, seeded sampling for `g ≥ 2`, and the small-rank
//! classification report built from End-algebra fingerprints.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::hom_algebra::{algebra_fingerprint, end_algebra, Fingerprint, Template};
use crate::linalg::Matrix;
use crate::module_rep::{Partition, UnipotentModule};

/// Bumped whenever a sampling distribution changes.
pub const SAMPLER_VERSION: &str = "hvb-sampler/1";
/// Sampling attempts allowed per requested indecomposable before a cell gives up.
pub const ATTEMPTS_PER_SAMPLE: usize = 50;
/// Coefficient range for the one-nilpotent family.
const POLY_COEFF_RANGE: i64 = 3;
/// Entry range for the off-diagonal parts of conjugating matrices.
const CONJ_ENTRY_RANGE: i64 = 2;

/// The three generator families behind [`random_module`].
pub const FAMILIES: [&str; 3] = [
    "monomial: k[x_1..x_g]/I for a random order ideal of standard monomials grown by adding random corners",
    "one-nilpotent: N_i = sum_k c_ik N^k with N a random partition module and c_ik uniform in [-3,3]",
    "conjugate: one of the two families above conjugated by L*U, L and U unitriangular with entries in [-2,2]",
];

/// One module with its End fingerprint.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CatalogEntry {
    pub g: usize,
    pub rank: usize,
    /// Partition for `g = 1` enumeration, constructor recipe for sampled modules.
    pub descriptor: String,
    pub end_dim: usize,
    pub radical_dim: usize,
    pub radical_index: usize,
    pub template: Template,
    pub fingerprint: Fingerprint,
    pub indecomposable: bool,
    pub seed: Option<u64>,
}

impl CatalogEntry {
    pub fn from_module(module: &UnipotentModule, descriptor: String, seed: Option<u64>) -> Result<CatalogEntry> {
        let algebra = end_algebra(module)?;
        let fingerprint = algebra_fingerprint(&algebra)?;
        Ok(CatalogEntry {
            g: module.g(),
            rank: module.dim(),
            descriptor,
            end_dim: fingerprint.dim,
            radical_dim: fingerprint.radical_dim,
            radical_index: fingerprint.radical_index,
            template: fingerprint.template,
            indecomposable: algebra.is_local()?,
            fingerprint,
            seed,
        })
    }
}

/// One entry per partition of each `n ≤ max_rank`, `n` ascending and partitions in
/// reverse lexicographic order.
pub fn enumerate_g1(max_rank: usize, field: Field) -> Result<Vec<CatalogEntry>> {
    if max_rank == 0 {
        return Err(Error::InvalidArgument("max rank must be at least 1".into()));
    }
    let mut out = Vec::new();
    for n in 1..=max_rank {
        for p in Partition::all(n) {
            out.push(CatalogEntry::from_module(&p.module(field), p.to_string(), None)?);
        }
    }
    Ok(out)
}

/// Deterministic random module together with the recipe that built it.
pub fn random_module_with_recipe(g: usize, dim: usize, seed: u64, field: Field) -> Result<(UnipotentModule, String)> {
    if g == 0 || dim == 0 {
        return Err(Error::InvalidArgument("random modules need g >= 1 and dim >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match rng.gen_range(0..3) {
        0 => monomial_family(g, dim, &mut rng, field),
        1 => one_nilpotent_family(g, dim, &mut rng, field),
        _ => {
            let (inner, recipe) = if rng.gen_bool(0.5) {
                monomial_family(g, dim, &mut rng, field)?
            } else {
                one_nilpotent_family(g, dim, &mut rng, field)?
            };
            let p = random_invertible(dim, &mut rng, field);
            Ok((inner.conjugate(&p)?, format!("conjugate({recipe})")))
        }
    }
}

pub fn random_module(g: usize, dim: usize, seed: u64, field: Field) -> Result<UnipotentModule> {
    random_module_with_recipe(g, dim, seed, field).map(|(m, _)| m)
}

fn monomial_family(g: usize, dim: usize, rng: &mut ChaCha8Rng, field: Field) -> Result<(UnipotentModule, String)> {
    let mut ideal: BTreeSet<Vec<u32>> = BTreeSet::from([vec![0; g]]);
    while ideal.len() < dim {
        let corners = outer_corners(&ideal, g);
        let pick = corners[rng.gen_range(0..corners.len())].clone();
        ideal.insert(pick);
    }
    let generators = outer_corners(&ideal, g);
    let module = UnipotentModule::from_monomial_ideal(g, &generators, field)?;
    let text: Vec<String> =
        generators.iter().map(|e| e.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")).collect();
    Ok((module, format!("monomial({})", text.join(";"))))
}

/// Monomials outside the order ideal all of whose immediate divisors lie inside.
fn outer_corners(ideal: &BTreeSet<Vec<u32>>, g: usize) -> Vec<Vec<u32>> {
    let mut out = BTreeSet::new();
    for m in ideal {
        for i in 0..g {
            let mut next = m.clone();
            next[i] += 1;
            if ideal.contains(&next) {
                continue;
            }
            let closed = (0..g).filter(|&j| next[j] > 0).all(|j| {
                let mut below = next.clone();
                below[j] -= 1;
                ideal.contains(&below)
            });
            if closed {
                out.insert(next);
            }
        }
    }
    out.into_iter().collect()
}

fn one_nilpotent_family(g: usize, dim: usize, rng: &mut ChaCha8Rng, field: Field) -> Result<(UnipotentModule, String)> {
    let partitions = Partition::all(dim);
    let partition = partitions[rng.gen_range(0..partitions.len())].clone();
    let base = partition.module(field);
    let n = &base.operators()[0];
    let depth = partition.parts()[0];
    let powers: Vec<Matrix> = (1..depth).map(|k| n.pow(k)).collect();
    let mut coeffs = Vec::with_capacity(g);
    let mut operators = Vec::with_capacity(g);
    for _ in 0..g {
        let c: Vec<i64> = powers.iter().map(|_| rng.gen_range(-POLY_COEFF_RANGE..=POLY_COEFF_RANGE)).collect();
        let mut op = Matrix::zeros(dim, dim, field);
        for (ck, pk) in c.iter().zip(&powers) {
            op = &op + &pk.scale(&field.from_i64(*ck));
        }
        operators.push(op);
        coeffs.push(c);
    }
    let text: Vec<String> = coeffs
        .iter()
        .map(|c| format!("[{}]", c.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")))
        .collect();
    Ok((UnipotentModule::new(g, operators)?, format!("poly({partition};{})", text.join(";"))))
}

fn random_invertible(n: usize, rng: &mut ChaCha8Rng, field: Field) -> Matrix {
    let mut lower = Matrix::identity(n, field);
    let mut upper = Matrix::identity(n, field);
    for r in 0..n {
        for c in 0..n {
            if r > c {
                lower.set(r, c, field.from_i64(rng.gen_range(-CONJ_ENTRY_RANGE..=CONJ_ENTRY_RANGE)));
            } else if r < c {
                upper.set(r, c, field.from_i64(rng.gen_range(-CONJ_ENTRY_RANGE..=CONJ_ENTRY_RANGE)));
            }
        }
    }
    &lower * &upper
}

/// Draws modules of the given rank until `count` indecomposables are found, giving up
/// after `count * ATTEMPTS_PER_SAMPLE` attempts. Returns the entries and the number of
/// modules examined.
pub fn sample_indecomposables(
    g: usize,
    rank: usize,
    count: usize,
    seed: u64,
    field: Field,
) -> Result<(Vec<CatalogEntry>, usize)> {
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    master.set_stream(((g as u64) << 32) | rank as u64);
    let mut entries = Vec::new();
    let mut examined = 0;
    while entries.len() < count && examined < count * ATTEMPTS_PER_SAMPLE {
        let s: u64 = master.gen();
        examined += 1;
        let (module, recipe) = random_module_with_recipe(g, rank, s, field)?;
        let entry = CatalogEntry::from_module(&module, recipe, Some(s))?;
        if entry.indecomposable {
            entries.push(entry);
        }
    }
    Ok((entries, examined))
}

/// Templates allowed for indecomposables of each small rank.
pub fn allowed_templates(rank: usize) -> Vec<Template> {
    match rank {
        1 => vec![Template::TruncatedPoly(1)],
        2 => vec![Template::TruncatedPoly(2)],
        3 => vec![Template::TruncatedPoly(2), Template::TruncatedPoly(3), Template::TwoVarSquareZero],
        _ => Vec::new(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReportHeader {
    pub version: &'static str,
    pub seed: u64,
    pub field: Field,
    pub g_max: usize,
    pub samples_per_cell: usize,
    pub families: Vec<&'static str>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub descriptor: String,
    pub seed: Option<u64>,
    pub template: Template,
    pub end_dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cell {
    pub g: usize,
    pub rank: usize,
    /// "exhaustive" for `g = 1`, "sampled" otherwise.
    pub source: &'static str,
    pub examined: usize,
    pub indecomposable: usize,
    pub allowed: Vec<Template>,
    pub templates: BTreeMap<String, usize>,
    pub end_dims: BTreeMap<usize, usize>,
    pub violations: Vec<Violation>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub name: &'static str,
    pub g: usize,
    pub descriptor: String,
    pub expected: Template,
    pub template: Template,
    pub end_dim: usize,
    pub matches: bool,
}

/// Search record for a rank-3 indecomposable whose End has dimension 2.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DimTwoSearch {
    pub samples: usize,
    pub found: bool,
    pub witness: Option<String>,
    pub statement: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassificationReport {
    pub header: ReportHeader,
    pub cells: Vec<Cell>,
    pub witnesses: Vec<Witness>,
    pub rank3_dim2: DimTwoSearch,
    pub entries: Vec<CatalogEntry>,
    pub pass: bool,
}

/// Rank 2 and 3 indecomposables: every partition for `g = 1`, `samples_per_cell`
/// seeded samples for each `2 ≤ g ≤ g_max`. Fingerprints outside the allowed list
/// are recorded as violations and fail the report.
pub fn classify_small_rank(
    g_max: usize,
    samples_per_cell: usize,
    seed: u64,
    field: Field,
) -> Result<ClassificationReport> {
    if g_max == 0 || samples_per_cell == 0 {
        return Err(Error::InvalidArgument("g_max and samples must be positive".into()));
    }
    let mut cells = Vec::new();
    let mut entries = Vec::new();
    for g in 1..=g_max {
        for rank in [2, 3] {
            let (found, examined, source) = if g == 1 {
                let all: Vec<CatalogEntry> =
                    enumerate_g1(rank, field)?.into_iter().filter(|e| e.rank == rank).collect();
                let n = all.len();
                (all.into_iter().filter(|e| e.indecomposable).collect::<Vec<_>>(), n, "exhaustive")
            } else {
                let (found, examined) = sample_indecomposables(g, rank, samples_per_cell, seed, field)?;
                (found, examined, "sampled")
            };
            let allowed = allowed_templates(rank);
            let mut templates = BTreeMap::new();
            let mut end_dims = BTreeMap::new();
            let mut violations = Vec::new();
            for e in &found {
                *templates.entry(e.template.to_string()).or_insert(0) += 1;
                *end_dims.entry(e.end_dim).or_insert(0) += 1;
                let dim_ok = rank != 3 || (2..=3).contains(&e.end_dim);
                if !allowed.contains(&e.template) || !dim_ok {
                    violations.push(Violation {
                        descriptor: e.descriptor.clone(),
                        seed: e.seed,
                        template: e.template,
                        end_dim: e.end_dim,
                    });
                }
            }
            cells.push(Cell {
                g,
                rank,
                source,
                examined,
                indecomposable: found.len(),
                allowed,
                templates,
                end_dims,
                violations,
            });
            entries.extend(found);
        }
    }
    let witnesses = witnesses(g_max, field)?;
    let rank3: Vec<&CatalogEntry> = entries.iter().filter(|e| e.rank == 3).collect();
    let dim_two = rank3.iter().find(|e| e.end_dim == 2);
    let rank3_dim2 = DimTwoSearch {
        samples: rank3.len(),
        found: dim_two.is_some(),
        witness: dim_two.map(|e| e.descriptor.clone()),
        statement: match dim_two {
            Some(_) => format!("witness found in {} samples", rank3.len()),
            None => format!("witness not found in {} samples", rank3.len()),
        },
    };
    let pass = cells.iter().all(|c| c.violations.is_empty()) && witnesses.iter().all(|w| w.matches);
    Ok(ClassificationReport {
        header: ReportHeader {
            version: SAMPLER_VERSION,
            seed,
            field,
            g_max,
            samples_per_cell,
            families: FAMILIES.to_vec(),
        },
        cells,
        witnesses,
        rank3_dim2,
        entries,
        pass,
    })
}

/// The rank-3 module with `N_1 = E_31`, `N_2 = E_32`. It needs two generators, so it
/// is not cyclic.
pub fn two_generator_module(field: Field) -> UnipotentModule {
    let n1 = Matrix::unit(3, 2, 0, field);
    let n2 = Matrix::unit(3, 2, 1, field);
    UnipotentModule::new(2, vec![n1, n2]).expect("square-zero commuting pair")
}

/// `k[x,y]/(x,y)²`.
pub fn square_zero_monomial(field: Field) -> UnipotentModule {
    UnipotentModule::from_monomial_ideal(2, &[vec![2, 0], vec![1, 1], vec![0, 2]], field).expect("finite colength")
}

fn witnesses(g_max: usize, field: Field) -> Result<Vec<Witness>> {
    let mut candidates =
        vec![("F3", UnipotentModule::jordan(3, field)?, "jordan(3)".to_string(), Template::TruncatedPoly(3))];
    if g_max >= 2 {
        candidates.push((
            "monomial_square_zero",
            square_zero_monomial(field),
            "monomial(2,0;1,1;0,2)".into(),
            Template::TwoVarSquareZero,
        ));
        candidates.push((
            "two_generator",
            two_generator_module(field),
            "matrices{N1=E31;N2=E32}".into(),
            Template::TwoVarSquareZero,
        ));
    }
    candidates
        .into_iter()
        .map(|(name, module, descriptor, expected)| {
            let e = CatalogEntry::from_module(&module, descriptor, None)?;
            Ok(Witness {
                name,
                g: module.g(),
                descriptor: e.descriptor,
                expected,
                template: e.template,
                end_dim: e.end_dim,
                matches: e.template == expected && e.indecomposable,
            })
        })
        .collect()
}

/// CSV atlas with columns `g, rank, descriptor, end_dim, radical_dim, radical_index,
/// template, indecomposable`.
pub fn atlas_csv(entries: &[CatalogEntry]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::InvalidArgument(format!("csv: {e}"));
    w.write_record([
        "g",
        "rank",
        "descriptor",
        "end_dim",
        "radical_dim",
        "radical_index",
        "template",
        "indecomposable",
    ])
    .map_err(io)?;
    for e in entries {
        w.write_record([
            e.g.to_string(),
            e.rank.to_string(),
            e.descriptor.clone(),
            e.end_dim.to_string(),
            e.radical_dim.to_string(),
            e.radical_index.to_string(),
            e.template.to_string(),
            e.indecomposable.to_string(),
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidArgument(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// JSON mirror of [`atlas_csv`].
pub fn atlas_json(entries: &[CatalogEntry]) -> serde_json::Value {
    serde_json::Value::Array(
        entries
            .iter()
            .map(|e| {
                serde_json::json!({
                    "g": e.g,
                    "rank": e.rank,
                    "descriptor": e.descriptor,
                    "end_dim": e.end_dim,
                    "radical_dim": e.radical_dim,
                    "radical_index": e.radical_index,
                    "template": e.template,
                    "indecomposable": e.indecomposable,
                })
            })
            .collect(),
    )
}

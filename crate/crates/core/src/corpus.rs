//! Named states, seeded random corpora and a compact text syntax for them.
//!
//! Syntax accepted by [`StateSpec::from_str`]:
//!
//! | text | meaning |
//! |---|---|
//! | `vacuum` | `|0⟩` |
//! | `fock:N` | `|N⟩` |
//! | `coherent:RE[,IM]` | coherent state, cutoff chosen for tail < 1e-14 |
//! | `squeezed:R` | squeezed vacuum, cutoff chosen the same way |
//! | `thermal:NBAR` | thermal state |
//! | `sigma-nonpositive` | `diag(2/3, -1/3, 2/3)`, unit trace and unit purity but not positive |
//! | `random:COUNT[:CUTOFF[:RANK]]` | seeded corpus; rank 1 is pure, default alternates pure/mixed with cutoffs 2–10 |
//! | `random-pure:COUNT`, `random-mixed:COUNT` | single-class corpora, cutoffs 2–10 |
//! | `file:PATH` | matrix file, see [`parse_matrix`] |
//!
//! Random corpora are reproducible from the seed passed to [`StateSpec::expand`].

use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fock::{make_coherent, make_fock, make_squeezed_vacuum, random_mixed, random_pure, CMatrix, DensityOperator, PureState, C64};

/// Tail weight below which an automatic cutoff is accepted.
pub const AUTO_TAIL: f64 = 1e-14;
/// Largest automatic cutoff.
pub const AUTO_CUTOFF_MAX: usize = 120;
/// Cutoff range of random corpora.
pub const CORPUS_CUTOFFS: (usize, usize) = (2, 10);

/// A state with a stable identifier; `pure` is kept when the input is pure.
#[derive(Debug, Clone)]
pub struct NamedState {
    pub id: String,
    pub rho: DensityOperator,
    pub pure: Option<PureState>,
}

impl NamedState {
    pub fn from_pure(id: impl Into<String>, psi: PureState) -> Self {
        Self { id: id.into(), rho: psi.to_density(), pure: Some(psi) }
    }

    pub fn from_mixed(id: impl Into<String>, rho: DensityOperator) -> Self {
        Self { id: id.into(), rho, pure: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateClass {
    Pure,
    Mixed,
}

fn corpus_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(index as u64)
}

/// `count` random states of one class, cutoffs uniform in 2–10, mixed ranks
/// uniform in `2..=cutoff`.
pub fn random_corpus(seed: u64, count: usize, class: StateClass) -> Result<Vec<NamedState>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let cutoff = rng.random_range(CORPUS_CUTOFFS.0..=CORPUS_CUTOFFS.1);
            let s = corpus_seed(seed, i);
            match class {
                StateClass::Pure => Ok(NamedState::from_pure(format!("pure:{s}:c{cutoff}"), random_pure(s, cutoff)?)),
                StateClass::Mixed => {
                    let rank = rng.random_range(2..=cutoff);
                    Ok(NamedState::from_mixed(format!("mixed:{s}:c{cutoff}:r{rank}"), random_mixed(s, cutoff, rank)?))
                }
            }
        })
        .collect()
}

/// Smallest cutoff whose truncation tail is below [`AUTO_TAIL`].
pub fn auto_cutoff(make: impl Fn(usize) -> Result<PureState>) -> Result<PureState> {
    let mut cutoff = 4;
    loop {
        let psi = make(cutoff)?;
        if psi.tail_weight() < AUTO_TAIL {
            return Ok(psi);
        }
        if cutoff >= AUTO_CUTOFF_MAX {
            return Err(Error::InvalidParameter(format!("state needs a cutoff above {AUTO_CUTOFF_MAX}")));
        }
        cutoff += 2;
    }
}

/// The trace-one, purity-one operator `diag(2/3, -1/3, 2/3)` that is not a state.
pub fn sigma_nonpositive() -> DensityOperator {
    let m = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        C64::new(2.0 / 3.0, 0.0),
        C64::new(-1.0 / 3.0, 0.0),
        C64::new(2.0 / 3.0, 0.0),
    ]));
    DensityOperator::from_matrix_nonpositive(m).expect("fixed operator is Hermitian with unit trace")
}

#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    Fock(usize),
    Coherent(C64),
    Squeezed(f64),
    Thermal(f64),
    SigmaNonpositive,
    Random { count: usize, cutoff: Option<usize>, rank: Option<usize> },
    RandomClass { count: usize, class: StateClass },
    File(String),
}

fn num<T: FromStr>(text: &str, what: &str) -> Result<T> {
    text.trim().parse().map_err(|_| Error::InvalidParameter(format!("cannot parse {what} from '{text}'")))
}

impl FromStr for StateSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let parts: Vec<&str> = if rest.is_empty() { vec![] } else { rest.split(':').collect() };
        let need = |n: usize| {
            if parts.len() == n {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("'{s}' expects {n} argument(s)")))
            }
        };
        match kind {
            "vacuum" => need(0).map(|_| StateSpec::Fock(0)),
            "fock" => need(1).and_then(|_| Ok(StateSpec::Fock(num(parts[0], "photon number")?))),
            "coherent" => {
                need(1)?;
                let (re, im) = parts[0].split_once(',').unwrap_or((parts[0], "0"));
                Ok(StateSpec::Coherent(C64::new(num(re, "Re alpha")?, num(im, "Im alpha")?)))
            }
            "squeezed" => need(1).and_then(|_| Ok(StateSpec::Squeezed(num(parts[0], "squeezing")?))),
            "thermal" => need(1).and_then(|_| Ok(StateSpec::Thermal(num(parts[0], "mean photon number")?))),
            "sigma-nonpositive" => need(0).map(|_| StateSpec::SigmaNonpositive),
            "random" => {
                if parts.is_empty() || parts.len() > 3 {
                    return Err(Error::InvalidParameter(format!("'{s}' expects random:COUNT[:CUTOFF[:RANK]]")));
                }
                let count = num(parts[0], "count")?;
                let cutoff = parts.get(1).map(|p| num(p, "cutoff")).transpose()?;
                let rank = parts.get(2).map(|p| num(p, "rank")).transpose()?;
                if cutoff == Some(0) {
                    return Err(Error::EmptySpace);
                }
                Ok(StateSpec::Random { count, cutoff, rank })
            }
            "random-pure" => need(1).and_then(|_| Ok(StateSpec::RandomClass { count: num(parts[0], "count")?, class: StateClass::Pure })),
            "random-mixed" => need(1).and_then(|_| Ok(StateSpec::RandomClass { count: num(parts[0], "count")?, class: StateClass::Mixed })),
            "file" if !rest.is_empty() => Ok(StateSpec::File(rest.to_string())),
            _ => Err(Error::InvalidParameter(format!("unknown state spec '{s}'"))),
        }
    }
}

impl StateSpec {
    /// Builds the named states. `allow_nonpositive` only affects file input.
    pub fn expand(&self, seed: u64, allow_nonpositive: bool) -> Result<Vec<NamedState>> {
        Ok(match self {
            StateSpec::Fock(n) => vec![NamedState::from_pure(format!("fock:{n}"), make_fock(*n, n + 2)?)],
            StateSpec::Coherent(a) => {
                vec![NamedState::from_pure(format!("coherent:{},{}", a.re, a.im), auto_cutoff(|c| make_coherent(*a, c))?)]
            }
            StateSpec::Squeezed(r) => vec![NamedState::from_pure(format!("squeezed:{r}"), auto_cutoff(|c| make_squeezed_vacuum(*r, c))?)],
            StateSpec::Thermal(nbar) => {
                if *nbar < 0.0 {
                    return Err(Error::InvalidParameter("thermal mean must be nonnegative".into()));
                }
                // geometric tail (n̄/(1+n̄))^c below the automatic tolerance
                let ratio = nbar / (1.0 + nbar);
                let cutoff = if ratio == 0.0 { 1 } else { ((AUTO_TAIL.ln() / ratio.ln()).ceil() as usize).clamp(1, AUTO_CUTOFF_MAX) };
                vec![NamedState::from_mixed(format!("thermal:{nbar}"), DensityOperator::thermal(*nbar, cutoff)?)]
            }
            StateSpec::SigmaNonpositive => vec![NamedState::from_mixed("sigma-nonpositive", sigma_nonpositive())],
            StateSpec::Random { count, cutoff: None, rank: None } => {
                let pure = random_corpus(seed, count.div_ceil(2), StateClass::Pure)?;
                let mixed = random_corpus(seed.wrapping_add(1), count / 2, StateClass::Mixed)?;
                let mut out = Vec::with_capacity(*count);
                let mut p = pure.into_iter();
                let mut m = mixed.into_iter();
                for i in 0..*count {
                    out.extend(if i % 2 == 0 { p.next() } else { m.next() });
                }
                out
            }
            StateSpec::Random { count, cutoff, rank } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..*count)
                    .map(|i| {
                        let c = cutoff.unwrap_or_else(|| rng.random_range(CORPUS_CUTOFFS.0..=CORPUS_CUTOFFS.1));
                        let r = rank.unwrap_or_else(|| rng.random_range(1..=c));
                        let s = corpus_seed(seed, i);
                        if r == 1 {
                            Ok(NamedState::from_pure(format!("pure:{s}:c{c}"), random_pure(s, c)?))
                        } else {
                            Ok(NamedState::from_mixed(format!("mixed:{s}:c{c}:r{r}"), random_mixed(s, c, r)?))
                        }
                    })
                    .collect::<Result<_>>()?
            }
            StateSpec::RandomClass { count, class } => random_corpus(seed, *count, *class)?,
            StateSpec::File(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::InvalidParameter(format!("cannot read {path}: {e}")))?;
                let m = parse_matrix(&text)?;
                let rho = if allow_nonpositive { DensityOperator::from_matrix_nonpositive(m)? } else { DensityOperator::from_matrix(m)? };
                vec![NamedState::from_mixed(format!("file:{path}"), rho)]
            }
        })
    }
}

/// Parses a square matrix: one row per line, entries separated by
/// whitespace, each entry `RE` or `RE,IM`. Blank lines and lines starting
/// with `#` are ignored.
pub fn parse_matrix(text: &str) -> Result<CMatrix> {
    let rows: Vec<Vec<C64>> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            l.split_whitespace()
                .map(|e| {
                    let (re, im) = e.split_once(',').unwrap_or((e, "0"));
                    Ok(C64::new(num(re, "matrix entry")?, num(im, "matrix entry")?))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let n = rows.len();
    if n == 0 {
        return Err(Error::EmptySpace);
    }
    if let Some(bad) = rows.iter().find(|r| r.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: bad.len() });
    }
    Ok(CMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

/// Parses a comma-separated list of specs and expands them in order.
pub fn expand_specs(list: &str, seed: u64, allow_nonpositive: bool) -> Result<Vec<NamedState>> {
    let mut out = Vec::new();
    for item in split_spec_list(list) {
        out.extend(item.parse::<StateSpec>()?.expand(seed, allow_nonpositive)?);
    }
    Ok(out)
}

/// Splits on `;` or on commas that do not belong to a `coherent:RE,IM` pair.
fn split_spec_list(list: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for piece in list.split(';') {
        for part in piece.split(',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            match out.last_mut() {
                Some(prev) if prev.starts_with("coherent:") && !prev.contains(',') && part.parse::<f64>().is_ok() => {
                    prev.push(',');
                    prev.push_str(part);
                }
                _ => out.push(part.to_string()),
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::purity::purity;

    #[test]
    fn corpus_is_deterministic_and_in_range() {
        let a = random_corpus(7, 20, StateClass::Mixed).unwrap();
        let b = random_corpus(7, 20, StateClass::Mixed).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.id, y.id);
            assert_eq!(x.rho, y.rho);
            assert!((2..=10).contains(&x.rho.cutoff()));
            assert!(purity(&x.rho) < 1.0 - 1e-6);
        }
        let p = random_corpus(7, 5, StateClass::Pure).unwrap();
        assert!(p.iter().all(|s| s.pure.is_some() && (purity(&s.rho) - 1.0).abs() < 1e-12));
    }

    #[test]
    fn spec_parsing() {
        assert_eq!("fock:3".parse::<StateSpec>().unwrap(), StateSpec::Fock(3));
        assert_eq!("coherent:1,-0.5".parse::<StateSpec>().unwrap(), StateSpec::Coherent(C64::new(1.0, -0.5)));
        assert_eq!("random:4:5:2".parse::<StateSpec>().unwrap(), StateSpec::Random { count: 4, cutoff: Some(5), rank: Some(2) });
        assert!("fock".parse::<StateSpec>().is_err());
        assert!("banana:1".parse::<StateSpec>().is_err());
        let states = expand_specs("fock:1,coherent:0.5,0.1;squeezed:0.5,random:6", 3, false).unwrap();
        assert_eq!(states.len(), 9);
        assert_eq!(states[1].id, "coherent:0.5,0.1");
        assert!(states[2].pure.as_ref().unwrap().tail_weight() < AUTO_TAIL);
        let random = &states[3..];
        assert!(random[0].pure.is_some() && random[1].pure.is_none());
    }

    #[test]
    fn matrix_file_format() {
        let m = parse_matrix("# sigma\n0.6667 0 0\n0 -0.3333 0\n0 0 0.6666\n").unwrap();
        assert!(DensityOperator::from_matrix(m.clone()).is_err());
        assert!(DensityOperator::from_matrix_nonpositive(m).is_ok());
        let m = parse_matrix("0.5 0.1,0.2\n0.1,-0.2 0.5").unwrap();
        assert_eq!(m[(1, 0)], C64::new(0.1, -0.2));
        assert!(parse_matrix("1 0\n0").is_err());
    }

    #[test]
    fn sigma_operator() {
        let s = sigma_nonpositive();
        assert!(s.nonpositive_allowed() && (purity(&s) - 1.0).abs() < 1e-15 && (s.trace() - 1.0).abs() < 1e-15);
    }
}

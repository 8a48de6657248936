//! Finite verification of conjugacy and eventual-conjugacy witnesses.
//!
//! Every relation checked here compares two sliding block codes. Past the
//! boundary region both sides use the same stationary rule on the same input
//! window, so exhausting all admissible words of a fixed length decides each
//! relation.

use serde::Serialize;

use crate::code::{CodeError, SlidingBlockCode};
use crate::matrix::{admissible_words, Letter, Matrix01};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    ForwardWellDefined,
    BackwardWellDefined,
    BackwardAfterForward,
    ForwardAfterBackward,
    ForwardShift,
    BackwardShift,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub check: Check,
    /// Offending input word, in the labels of its shift.
    pub word: String,
    #[serde(skip)]
    pub letters: Vec<Letter>,
    pub coordinate: Option<usize>,
    pub expected: Option<String>,
    pub found: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verification {
    pub passed: bool,
    pub lag: Option<usize>,
    pub words_checked: usize,
    pub counterexample: Option<Counterexample>,
}

impl Verification {
    fn pass(words_checked: usize, lag: Option<usize>) -> Self {
        Verification { passed: true, lag, words_checked, counterexample: None }
    }

    fn fail(words_checked: usize, lag: Option<usize>, cx: Counterexample) -> Self {
        Verification { passed: false, lag, words_checked, counterexample: Some(cx) }
    }
}

fn ensure_opposite(fwd: &SlidingBlockCode, bwd: &SlidingBlockCode) -> Result<(), CodeError> {
    if **fwd.source() == **bwd.target() && **fwd.target() == **bwd.source() {
        Ok(())
    } else {
        Err(CodeError::MatrixMismatch)
    }
}

fn well_defined(code: &SlidingBlockCode, check: Check) -> Result<usize, Counterexample> {
    match code.ill_defined_at() {
        None => Ok(admissible_words(code.source(), code.well_definedness_window()).len()),
        Some((input, output)) => Err(Counterexample {
            check,
            word: code.source().format_letters(&input),
            letters: input,
            coordinate: None,
            expected: None,
            found: Some(code.target().format_letters(&output)),
        }),
    }
}

fn round_trip(
    first: &SlidingBlockCode,
    second: &SlidingBlockCode,
    window: usize,
    check: Check,
) -> Result<usize, Counterexample> {
    let matrix: &Matrix01 = first.source();
    let words = admissible_words(matrix, window);
    for w in &words {
        let mid = first.apply_prefix(w.letters()).expect("well-defined code");
        let back = second.apply_prefix(&mid).expect("well-defined code");
        if let Some(k) = (0..back.len()).find(|&k| back[k] != w.letters()[k]) {
            return Err(Counterexample {
                check,
                word: w.display(matrix),
                letters: w.letters().to_vec(),
                coordinate: Some(k),
                expected: Some(matrix.label(w.letters()[k]).to_string()),
                found: Some(matrix.label(back[k]).to_string()),
            });
        }
    }
    Ok(words.len())
}

/// Checks that both codes are well defined and mutually inverse.
pub fn verify_homeomorphism(fwd: &SlidingBlockCode, bwd: &SlidingBlockCode) -> Result<Verification, CodeError> {
    ensure_opposite(fwd, bwd)?;
    let window = fwd.memory() + fwd.anticipation() + bwd.memory() + bwd.anticipation() + 2;
    let mut checked = 0;
    let steps: [&dyn Fn() -> Result<usize, Counterexample>; 4] = [
        &|| well_defined(fwd, Check::ForwardWellDefined),
        &|| well_defined(bwd, Check::BackwardWellDefined),
        &|| round_trip(fwd, bwd, window, Check::BackwardAfterForward),
        &|| round_trip(bwd, fwd, window, Check::ForwardAfterBackward),
    ];
    for step in steps {
        match step() {
            Ok(n) => checked += n,
            Err(cx) => return Ok(Verification::fail(checked, None, cx)),
        }
    }
    Ok(Verification::pass(checked, None))
}

/// Checks `σ^L(h(σx)) = σ^{L+1}(h(x))` for one code.
fn lag_relation(code: &SlidingBlockCode, lag: usize, check: Check) -> Result<usize, Counterexample> {
    let m = code.memory();
    let len = m + code.anticipation() + lag + 3;
    let matrix = code.source();
    let words = admissible_words(matrix, len);
    for w in &words {
        let x = w.letters();
        let hx = code.apply_prefix(x).expect("well-defined code");
        let hsx = code.apply_prefix(&x[1..]).expect("well-defined code");
        for n in 0..=m + 1 {
            let lhs = hsx[n + lag];
            let rhs = hx[n + lag + 1];
            if lhs != rhs {
                return Err(Counterexample {
                    check,
                    word: w.display(matrix),
                    letters: x.to_vec(),
                    coordinate: Some(n),
                    expected: Some(code.target().label(rhs).to_string()),
                    found: Some(code.target().label(lhs).to_string()),
                });
            }
        }
    }
    Ok(words.len())
}

fn verify_lagged(fwd: &SlidingBlockCode, bwd: &SlidingBlockCode, lag: usize) -> Result<Verification, CodeError> {
    let homeo = verify_homeomorphism(fwd, bwd)?;
    if !homeo.passed {
        return Ok(Verification { lag: Some(lag), ..homeo });
    }
    let mut checked = homeo.words_checked;
    for (code, check) in [(fwd, Check::ForwardShift), (bwd, Check::BackwardShift)] {
        match lag_relation(code, lag, check) {
            Ok(n) => checked += n,
            Err(cx) => return Ok(Verification::fail(checked, Some(lag), cx)),
        }
    }
    Ok(Verification::pass(checked, Some(lag)))
}

/// A claimed conjugacy: forward code `A -> B` and its inverse `B -> A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjugacyWitness {
    pub forward: SlidingBlockCode,
    pub backward: SlidingBlockCode,
}

impl ConjugacyWitness {
    pub fn new(forward: SlidingBlockCode, backward: SlidingBlockCode) -> Self {
        ConjugacyWitness { forward, backward }
    }

    pub fn identity(matrix: std::sync::Arc<Matrix01>) -> Self {
        let id = SlidingBlockCode::identity(matrix);
        ConjugacyWitness { forward: id.clone(), backward: id }
    }

    pub fn inverse(&self) -> Self {
        ConjugacyWitness { forward: self.backward.clone(), backward: self.forward.clone() }
    }

    /// Verifies the witness and wraps it as a [`Conjugacy`].
    pub fn into_conjugacy(self) -> Result<Conjugacy, Box<Verification>> {
        match verify_conjugacy(&self) {
            Ok(v) if v.passed => Ok(Conjugacy(self)),
            Ok(v) => Err(Box::new(v)),
            Err(_) => Err(Box::new(Verification {
                passed: false,
                lag: Some(0),
                words_checked: 0,
                counterexample: None,
            })),
        }
    }
}

/// A witness that passed [`verify_conjugacy`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conjugacy(ConjugacyWitness);

impl Conjugacy {
    pub fn forward(&self) -> &SlidingBlockCode {
        &self.0.forward
    }

    pub fn backward(&self) -> &SlidingBlockCode {
        &self.0.backward
    }

    pub fn witness(&self) -> &ConjugacyWitness {
        &self.0
    }

    pub fn inverse(&self) -> Conjugacy {
        Conjugacy(self.0.inverse())
    }

    /// `next ∘ self`. Composites of conjugacies are conjugacies.
    pub fn then(&self, next: &Conjugacy) -> Result<Conjugacy, CodeError> {
        let forward = SlidingBlockCode::compose(next.forward(), self.forward())?;
        let backward = SlidingBlockCode::compose(self.backward(), next.backward())?;
        Ok(Conjugacy(ConjugacyWitness { forward, backward }))
    }
}

/// A claimed eventual conjugacy with one shared lag for both directions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventualConjugacyWitness {
    pub forward: SlidingBlockCode,
    pub backward: SlidingBlockCode,
    pub lag: usize,
}

impl EventualConjugacyWitness {
    pub fn new(forward: SlidingBlockCode, backward: SlidingBlockCode, lag: usize) -> Self {
        EventualConjugacyWitness { forward, backward, lag }
    }

    pub fn with_lag(&self, lag: usize) -> Self {
        EventualConjugacyWitness { lag, ..self.clone() }
    }
}

/// Homeomorphism plus `h∘σ_A = σ_B∘h` in both directions.
pub fn verify_conjugacy(w: &ConjugacyWitness) -> Result<Verification, CodeError> {
    verify_lagged(&w.forward, &w.backward, 0)
}

/// Homeomorphism plus both lag-`L` relations.
pub fn verify_eventual_conjugacy(w: &EventualConjugacyWitness) -> Result<Verification, CodeError> {
    verify_lagged(&w.forward, &w.backward, w.lag)
}

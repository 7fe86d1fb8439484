//! Inter-rater agreement and label association.

use super::{check_lengths, EvalError};
use crate::corpus::{Smell, SmellLabels};

/// Cohen's kappa for two binary raters.
///
/// When chance agreement is 1 (both raters constant) the value is 1 if they
/// agree everywhere and 0 otherwise.
pub fn cohen_kappa(a: &[bool], b: &[bool]) -> Result<f64, EvalError> {
    check_lengths(a.len(), b.len())?;
    let n = a.len() as f64;
    let agree = a.iter().zip(b).filter(|(x, y)| x == y).count() as f64 / n;
    let pa = a.iter().filter(|&&x| x).count() as f64 / n;
    let pb = b.iter().filter(|&&x| x).count() as f64 / n;
    let chance = pa * pb + (1.0 - pa) * (1.0 - pb);
    if chance == 1.0 {
        return Ok(if agree == 1.0 { 1.0 } else { 0.0 });
    }
    Ok((agree - chance) / (1.0 - chance))
}

/// Kappa for each smell between two annotations of the same units.
pub fn kappa_per_smell(a: &[SmellLabels], b: &[SmellLabels]) -> Result<[f64; 5], EvalError> {
    check_lengths(a.len(), b.len())?;
    let mut out = [0.0; 5];
    for smell in Smell::ALL {
        let col = |y: &[SmellLabels]| y.iter().map(|l| l.get(smell)).collect::<Vec<_>>();
        out[smell.index()] = cohen_kappa(&col(a), &col(b))?;
    }
    Ok(out)
}

/// Phi coefficient of two binary columns; `None` when either is constant.
pub fn phi(a: &[bool], b: &[bool]) -> Option<f64> {
    let (mut n11, mut n10, mut n01, mut n00) = (0u64, 0u64, 0u64, 0u64);
    for (&x, &y) in a.iter().zip(b) {
        match (x, y) {
            (true, true) => n11 += 1,
            (true, false) => n10 += 1,
            (false, true) => n01 += 1,
            (false, false) => n00 += 1,
        }
    }
    let den = ((n11 + n10) * (n01 + n00) * (n11 + n01) * (n10 + n00)) as f64;
    if den == 0.0 {
        return None;
    }
    let num = (n11 * n00) as f64 - (n10 * n01) as f64;
    Some((num / den.sqrt()).clamp(-1.0, 1.0))
}

pub type PhiMatrix = [[Option<f64>; 5]; 5];

/// Pairwise phi over the five smells. The diagonal is 1 for non-constant
/// columns.
pub fn phi_matrix(y: &[SmellLabels]) -> Result<PhiMatrix, EvalError> {
    if y.len() < 2 {
        return Err(EvalError::TooFewInstances { m: y.len(), k: 2 });
    }
    let cols: Vec<Vec<bool>> = Smell::ALL.iter().map(|&s| y.iter().map(|l| l.get(s)).collect()).collect();
    let mut out = [[None; 5]; 5];
    for i in 0..5 {
        for j in i..5 {
            let v = if i == j { phi(&cols[i], &cols[i]).map(|_| 1.0) } else { phi(&cols[i], &cols[j]) };
            out[i][j] = v;
            out[j][i] = v;
        }
    }
    Ok(out)
}

//! Anticommuting grouping by sorted insertion.

use crate::pauli::{PauliSum, PauliWord};

/// A set of mutually anticommuting Pauli words; `Σ d_q P_q / a` is unitary
/// with `a = sqrt(Σ d_q²)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AnticommutingGroup {
    members: Vec<(PauliWord, f64)>,
    norm: f64,
}

impl AnticommutingGroup {
    fn new(word: PauliWord, coeff: f64) -> Self {
        Self {
            members: vec![(word, coeff)],
            norm: coeff.abs(),
        }
    }

    fn accepts(&self, word: &PauliWord) -> bool {
        self.members
            .iter()
            .all(|(m, _)| m.anticommutes_unchecked(word))
    }

    fn push(&mut self, word: PauliWord, coeff: f64) {
        self.members.push((word, coeff));
        self.norm = self.members.iter().map(|(_, c)| c * c).sum::<f64>().sqrt();
    }

    pub fn members(&self) -> &[(PauliWord, f64)] {
        &self.members
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }
}

/// Greedy sorted insertion over the words of a merged sum. The identity term,
/// if present, is skipped.
pub fn ac_grouping(sum: &PauliSum) -> Vec<AnticommutingGroup> {
    ac_grouping_terms(sum.iter())
}

/// Greedy sorted insertion: terms by decreasing `|d_q|` (stable, so ties keep
/// input order), each placed in the first group it anticommutes with
/// entirely. Repeated words are allowed and always land in different groups.
pub fn ac_grouping_terms(
    terms: impl IntoIterator<Item = (PauliWord, f64)>,
) -> Vec<AnticommutingGroup> {
    let mut terms: Vec<(PauliWord, f64)> = terms
        .into_iter()
        .filter(|(w, _)| !w.is_identity())
        .collect();
    terms.sort_by(|a, b| b.1.abs().total_cmp(&a.1.abs()));
    let mut groups: Vec<AnticommutingGroup> = Vec::new();
    for (word, coeff) in terms {
        match groups.iter_mut().find(|g| g.accepts(&word)) {
            Some(g) => g.push(word, coeff),
            None => groups.push(AnticommutingGroup::new(word, coeff)),
        }
    }
    groups
}

/// `λ^(AC) = Σ_n a_n`.
pub fn ac_one_norm(groups: &[AnticommutingGroup]) -> f64 {
    groups.iter().map(|g| g.norm).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> PauliWord {
        PauliWord::from_label(s).unwrap()
    }

    #[test]
    fn repeated_words_split() {
        let groups = ac_grouping_terms([(w("Z"), 1.0), (w("Z"), 1.0), (w("X"), 1.0)]);
        assert_eq!(groups.len(), 2);
        assert!((ac_one_norm(&groups) - (1.0 + 2f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn single_term() {
        let groups = ac_grouping(&PauliSum::from_terms(1, [(w("X"), -0.3)]));
        assert_eq!(groups.len(), 1);
        assert!((ac_one_norm(&groups) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn pythagorean_pair() {
        let sum = PauliSum::from_terms(1, [(w("X"), 3.0), (w("Z"), 4.0)]);
        let groups = ac_grouping(&sum);
        assert_eq!(groups.len(), 1);
        assert!((ac_one_norm(&groups) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn identity_is_ignored_and_commuting_terms_split() {
        let sum = PauliSum::from_terms(2, [(w("II"), 9.0), (w("ZI"), 1.0), (w("IZ"), 2.0)]);
        let groups = ac_grouping(&sum);
        assert_eq!(groups.len(), 2);
        assert_eq!(groups[0].members()[0].0, w("IZ"));
        assert!((ac_one_norm(&groups) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn insertion_respects_all_members() {
        // XI and ZI anticommute; YZ anticommutes with XI but also with ZI? Y vs Z on
        // qubit 0 anticommute, Z vs I commute -> yes. IX commutes with both.
        let sum = PauliSum::from_terms(
            2,
            [(w("XI"), 4.0), (w("ZI"), 3.0), (w("YZ"), 2.0), (w("IX"), 1.0)],
        );
        let groups = ac_grouping(&sum);
        assert_eq!(groups.len(), 2);
        assert_eq!(groups[0].members().len(), 3);
        for g in &groups {
            for (i, (a, _)) in g.members().iter().enumerate() {
                for (b, _) in &g.members()[i + 1..] {
                    assert!(a.anticommutes(b).unwrap());
                }
            }
        }
        assert!((groups[0].norm() - 29f64.sqrt()).abs() < 1e-12);
    }
}

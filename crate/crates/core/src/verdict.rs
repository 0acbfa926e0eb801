use crate::model::{Attribution, EvidenceItem, Outcome, TweetClaim, Verdict};

/// Combines all evidence for one claim into a verdict.
///
/// A matched Politwoops record proves the tweet existed and always yields
/// `Authentic`. Otherwise authenticity-implying ratings beat
/// fabrication-implying ones; `conflict` reports when both kinds are present.
/// The result does not depend on the order of `evidence`.
pub fn aggregate(_claim: &TweetClaim, mut evidence: Vec<EvidenceItem>) -> Verdict {
    let mut authentic = false;
    let mut fabricated = false;
    let mut existence_proof = false;
    for item in &evidence {
        existence_proof |= item.is_existence_proof();
        match item.implication() {
            Attribution::ImpliesAuthentic => authentic = true,
            Attribution::ImpliesFabricated => fabricated = true,
            Attribution::NoImplication => {}
        }
    }
    let outcome = if existence_proof || authentic {
        Outcome::Authentic
    } else if fabricated {
        Outcome::Fabricated
    } else {
        Outcome::Unverifiable
    };
    // (source, rank) first; the full ordering breaks remaining ties so the
    // echoed list is independent of input order.
    evidence.sort_by(|a, b| {
        (a.source(), a.rank())
            .cmp(&(b.source(), b.rank()))
            .then_with(|| a.cmp(b))
    });
    Verdict {
        outcome,
        evidence,
        conflict: authentic && fabricated,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{classify_rating, SourceId};

    fn claim() -> TweetClaim {
        TweetClaim::new("some tweet").unwrap()
    }

    fn rated(source: SourceId, rank: u32, label: &str) -> EvidenceItem {
        EvidenceItem::fact_check(source, format!("https://{source}/{rank}"), rank, classify_rating(label)).unwrap()
    }

    fn hit() -> EvidenceItem {
        EvidenceItem::politwoops("https://projects.propublica.org/politwoops/tweet/1", 1, "some tweet").unwrap()
    }

    #[test]
    fn politwoops_and_true_rating() {
        let v = aggregate(&claim(), vec![hit(), rated(SourceId::SnopesSearch, 1, "True")]);
        assert_eq!(v.outcome, Outcome::Authentic);
        assert!(!v.conflict);
        assert_eq!(v.evidence[0].source(), SourceId::SnopesSearch);
    }

    #[test]
    fn two_false_ratings() {
        let v = aggregate(
            &claim(),
            vec![rated(SourceId::SnopesSearch, 1, "False"), rated(SourceId::ReutersSearch, 1, "False")],
        );
        assert_eq!(v.outcome, Outcome::Fabricated);
        assert!(!v.conflict);
    }

    #[test]
    fn nothing_found() {
        let v = aggregate(&claim(), vec![]);
        assert_eq!(v.outcome, Outcome::Unverifiable);
        assert!(!v.conflict);
        assert!(v.evidence.is_empty());
    }

    #[test]
    fn politwoops_beats_false_rating() {
        let v = aggregate(&claim(), vec![hit(), rated(SourceId::SnopesSearch, 1, "False")]);
        assert_eq!(v.outcome, Outcome::Authentic);
        assert!(v.conflict);
    }

    #[test]
    fn unknown_ratings_are_unverifiable() {
        let v = aggregate(&claim(), vec![rated(SourceId::SnopesSearch, 1, ""), rated(SourceId::WebSearch, 2, "Mixture")]);
        assert_eq!(v.outcome, Outcome::Unverifiable);
    }

    #[test]
    fn evidence_sorted_by_source_then_rank() {
        let v = aggregate(
            &claim(),
            vec![
                rated(SourceId::WebSearch, 2, "False"),
                hit(),
                rated(SourceId::WebSearch, 1, "False"),
                rated(SourceId::SnopesSearch, 3, "False"),
            ],
        );
        let keys: Vec<_> = v.evidence.iter().map(|e| (e.source(), e.rank())).collect();
        assert_eq!(
            keys,
            vec![
                (SourceId::SnopesSearch, 3),
                (SourceId::WebSearch, 1),
                (SourceId::WebSearch, 2),
                (SourceId::Politwoops, 1),
            ]
        );
    }
}

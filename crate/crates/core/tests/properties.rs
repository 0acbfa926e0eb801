//! Property tests for the invariants each module promises.

use proptest::prelude::*;
use proptest::sample::select;

use tweetcheck_core::dataset::{parse_records, serialize_dataset};
use tweetcheck_core::eval::{EngineReport, QueryOutcome, RankScore};
use tweetcheck_core::model::{implied_attribution, Attribution};
use tweetcheck_core::query::{decode_query, encode_query, Encoding, Truncation};
use tweetcheck_core::rating::{scrape_reuters_rating, scrape_snopes_rating};
use tweetcheck_core::search::{match_politwoops, normalize_text, parse_site_results, PolitwoopsHit};
use tweetcheck_core::selectors::{PageKind, Selectors};
use tweetcheck_core::{
    aggregate, build_query, canonicalize_article_url, classify_rating, truncate_body, EvidenceItem, FetchResponse,
    GroundTruthRecord, Outcome, QuerySpec, SourceId, TweetClaim,
};

fn spec() -> impl Strategy<Value = QuerySpec> {
    (
        select(SourceId::ALL.to_vec()),
        10usize..300,
        select(vec![Encoding::PlusEncoded, Encoding::PercentEncoded]),
        select(vec![Truncation::CharPrefix, Truncation::WordBoundaryPrefix]),
        any::<bool>(),
    )
        .prop_map(|(source, max, enc, trunc, quoted)| {
            QuerySpec::new(source, max, enc, trunc).unwrap().with_quoted(quoted)
        })
}

fn body() -> impl Strategy<Value = String> {
    prop_oneof![
        "[a-zA-Z0-9 ,.!?'%&@#\n\t-]{1,400}",
        any::<String>(),
        "[\u{0}-\u{7f}é漢🙂 ]{1,300}",
    ]
    .prop_filter("non-blank body", |b| !b.trim().is_empty())
}

const LABELS: [&str; 12] = [
    "True", "False", "FALSE.", "Fake", "Mixture", "Misattributed", "Correct Attribution", "Satire", "", "Outdated",
    "Unproven", "Partly false",
];

fn fact_check_source() -> impl Strategy<Value = SourceId> {
    select(vec![
        SourceId::SnopesSearch,
        SourceId::ReutersSearch,
        SourceId::WebSearch,
        SourceId::WebSearchSiteSnopes,
    ])
}

fn evidence_item() -> impl Strategy<Value = EvidenceItem> {
    prop_oneof![
        (1u32..5, "[a-z]{1,8}").prop_map(|(rank, t)| {
            EvidenceItem::politwoops(format!("https://projects.propublica.org/politwoops/tweet/{rank}"), rank, t)
                .unwrap()
        }),
        (fact_check_source(), 1u32..5, select(LABELS.to_vec()), "[a-z]{1,6}").prop_map(|(s, rank, label, slug)| {
            EvidenceItem::fact_check(s, format!("https://www.snopes.com/fact-check/{slug}/"), rank, classify_rating(label))
                .unwrap()
        }),
    ]
}

fn url_like() -> impl Strategy<Value = String> {
    let host = select(vec![
        "www.snopes.com",
        "snopes.com",
        "WWW.Snopes.COM",
        "www.reuters.com",
        "reuters.com",
        "example.org",
        "www.www.example.org",
        "www.",
        "sub.example.co.uk",
    ]);
    let path = prop::collection::vec(
        select(vec!["fact-check", "article", "idUSKCN2242AK", "x-idUSKBN21A0AA", "a b", "news", "%41", ""]),
        0..4,
    );
    prop_oneof![
        4 => (select(vec!["http", "https", "HTTPS"]), host, path, any::<bool>(), prop::option::of("[a-z=&]{0,8}"), prop::option::of("[a-z]{0,5}"))
            .prop_map(|(scheme, host, path, slash, query, frag)| {
                let mut u = format!("{scheme}://{host}/{}", path.join("/"));
                if slash { u.push('/'); }
                if let Some(q) = query { u.push('?'); u.push_str(&q); }
                if let Some(f) = frag { u.push('#'); u.push_str(&f); }
                u
            }),
        1 => any::<String>(),
    ]
}

fn record() -> impl Strategy<Value = GroundTruthRecord> {
    (
        "[a-z][a-z0-9-]{0,10}",
        any::<bool>(),
        body(),
        "[a-z0-9-]{1,20}",
        prop::option::of("[0-9]{1,12}"),
    )
        .prop_map(|(id, authentic, tweet_body, slug, reuters)| GroundTruthRecord {
            id,
            authentic,
            tweet_body,
            snopes_url: format!("https://www.snopes.com/fact-check/{slug}/"),
            live_url: authentic.then(|| format!("https://example.com/status/{slug}")),
            archived_url: authentic.then(|| format!("https://web.archive.org/web/2020/https://example.com/status/{slug}")),
            reuters_url: reuters.map(|n| format!("https://www.reuters.com/article/x-idUSKCN{n}")),
        })
}

fn outcome(id: usize, rank: Option<u32>) -> QueryOutcome {
    let s = RankScore::at(rank);
    QueryOutcome {
        record_id: format!("r{id}"),
        source: SourceId::SnopesSearch,
        rank_of_relevant: s.rank_of_relevant,
        reciprocal_rank: s.reciprocal_rank,
        p_at_1: s.p_at_1,
        failure: None,
    }
}

fn page(url: &str, html: String) -> FetchResponse {
    FetchResponse {
        status: 200,
        final_url: url.to_string(),
        body: html.into_bytes(),
        content_type: "text/html".to_string(),
    }
}

proptest! {
    #[test]
    fn truncation_is_a_bounded_idempotent_prefix(b in body(), spec in spec()) {
        let t = truncate_body(&b, &spec);
        prop_assert!(t.chars().count() <= spec.max_chars());
        prop_assert!(b.starts_with(t));
        prop_assert_eq!(truncate_body(t, &spec), t);
    }

    #[test]
    fn encoding_round_trips(t in any::<String>(), enc in select(vec![Encoding::PlusEncoded, Encoding::PercentEncoded])) {
        prop_assert_eq!(decode_query(&encode_query(&t, enc), enc), t);
    }

    #[test]
    fn queries_have_no_control_characters(b in body(), spec in spec()) {
        let claim = TweetClaim::new(b).unwrap();
        let q = build_query(&claim, &spec);
        prop_assert!(!q.chars().any(char::is_control), "{:?}", q);
    }

    #[test]
    fn classification_is_total_and_verbatim(label in any::<String>()) {
        let r = classify_rating(&label);
        prop_assert_eq!(r.raw_label(), label.as_str());
    }

    #[test]
    fn implication_depends_on_kind_only(a in select(LABELS.to_vec()), b in select(LABELS.to_vec()), pad in "[ .!]{0,3}") {
        let ra = classify_rating(a);
        let rb = classify_rating(&format!("{}{pad}", b.to_uppercase()));
        if ra.kind() == rb.kind() {
            prop_assert_eq!(implied_attribution(&ra), implied_attribution(&rb));
        }
    }

    #[test]
    fn canonicalization_is_idempotent(u in url_like()) {
        let once = canonicalize_article_url(&u);
        prop_assert_eq!(canonicalize_article_url(&once), once.clone(), "{:?}", u);
    }

    #[test]
    fn aggregate_ignores_order(items in prop::collection::vec(evidence_item(), 0..6).prop_shuffle(), seed in any::<u64>()) {
        let claim = TweetClaim::new("x").unwrap();
        let mut shuffled = items.clone();
        let n = shuffled.len();
        if n > 1 {
            shuffled.rotate_left((seed as usize) % n);
            shuffled.swap(0, (seed as usize / 7) % n);
        }
        let a = aggregate(&claim, items.clone());
        let b = aggregate(&claim, shuffled);
        prop_assert_eq!(&a, &b);

        let authentic = items.iter().any(|e| e.implication() == Attribution::ImpliesAuthentic);
        let fabricated = items.iter().any(|e| e.implication() == Attribution::ImpliesFabricated);
        prop_assert_eq!(a.conflict, authentic && fabricated);
        if items.is_empty() {
            prop_assert_eq!(a.outcome, Outcome::Unverifiable);
        }

        let mut with_hit = items.clone();
        with_hit.push(EvidenceItem::politwoops("https://projects.propublica.org/politwoops/tweet/9", 9, "x").unwrap());
        prop_assert_eq!(aggregate(&claim, with_hit).outcome, Outcome::Authentic);
    }

    #[test]
    fn dataset_round_trips_in_order(records in prop::collection::vec(record(), 0..12)) {
        let text = serialize_dataset(&records);
        prop_assert_eq!(parse_records(&text).unwrap(), records);
    }

    #[test]
    fn rank_metrics_are_consistent(ranks in prop::collection::vec(prop::option::of(1u32..50), 1..40), seed in any::<u64>()) {
        let outcomes: Vec<_> = ranks.iter().enumerate().map(|(i, r)| outcome(i, *r)).collect();
        for o in &outcomes {
            prop_assert!((0.0..=1.0).contains(&o.reciprocal_rank));
            match o.rank_of_relevant {
                Some(k) => prop_assert_eq!(o.reciprocal_rank, 1.0 / f64::from(k)),
                None => prop_assert_eq!(o.reciprocal_rank, 0.0),
            }
            prop_assert!(f64::from(o.p_at_1) <= o.reciprocal_rank.ceil());
            if o.p_at_1 == 1 {
                prop_assert_eq!(o.reciprocal_rank, 1.0);
            }
        }
        let report = EngineReport::from_outcomes(SourceId::SnopesSearch, outcomes.clone()).unwrap();
        prop_assert!(report.mrr >= report.mean_p_at_1);

        let mut permuted = outcomes;
        let n = permuted.len();
        permuted.rotate_left((seed as usize) % n);
        permuted.reverse();
        let other = EngineReport::from_outcomes(SourceId::SnopesSearch, permuted).unwrap();
        prop_assert_eq!(other.mrr, report.mrr);
        prop_assert_eq!(other.mean_p_at_1, report.mean_p_at_1);
    }

    #[test]
    fn politwoops_matches_only_equal_normalized_text(
        words in prop::collection::vec("[a-zA-Z']{1,8}", 1..10),
        noise in prop::collection::vec("[a-zA-Z ]{1,40}", 0..4),
        upper in any::<bool>(),
    ) {
        let body = words.join(" ");
        let claim = TweetClaim::new(body.clone()).unwrap();
        let variant = if upper { body.to_uppercase() } else { words.join("  \n") }.replace('\'', "&#8217;");
        let mut hits: Vec<PolitwoopsHit> = noise
            .into_iter()
            .enumerate()
            .map(|(i, text)| PolitwoopsHit { tweet_text: text, detail_url: format!("https://p/{i}"), handle: String::new() })
            .collect();
        hits.push(PolitwoopsHit { tweet_text: variant, detail_url: "https://p/hit".into(), handle: String::new() });
        let found = match_politwoops(&claim, &hits);
        prop_assert!(found.is_some());
        prop_assert_eq!(normalize_text(&found.unwrap().tweet_text), normalize_text(&body));
    }

    #[test]
    fn site_results_are_unique_and_restricted(
        hrefs in prop::collection::vec(select(vec![
            "/fact-check/a/", "/fact-check/b", "https://www.snopes.com/fact-check/a/", "https://evil.example/fact-check/c/",
            "/news/2020/x/", "https://snopes.com.evil.example/fact-check/d/", "javascript:void(0)", "/fact-check/a/#c",
            "https://media.snopes.com/fact-check/e/",
        ]), 0..12),
    ) {
        let links: String = hrefs
            .iter()
            .map(|h| format!(r#"<article><a class="outer_article_link_wrapper" href="{h}">x</a></article>"#))
            .collect();
        let html = format!(r#"<html><body><div id="article-list">{links}</div></body></html>"#);
        let urls = parse_site_results(
            &page("https://www.snopes.com/search/q/", html),
            Selectors::default().get(PageKind::SnopesSearch),
            "snopes.com",
        )
        .unwrap();
        let mut dedup = urls.clone();
        dedup.sort();
        dedup.dedup();
        prop_assert_eq!(dedup.len(), urls.len());
        for u in &urls {
            let parsed = url::Url::parse(u).unwrap();
            let host = parsed.host_str().unwrap();
            prop_assert!(host == "snopes.com" || host.ends_with(".snopes.com"), "{}", u);
            prop_assert!(parsed.path().starts_with("/fact-check/"));
        }
    }

    #[test]
    fn scrapers_report_missing_on_pages_without_ratings(text in "[a-z ]{0,200}") {
        let html = format!("<html><head><title>t</title></head><body><h3>{text}</h3><p>{text}</p></body></html>");
        let snopes = scrape_snopes_rating(&page("https://www.snopes.com/fact-check/x/", html.clone())).unwrap();
        let reuters = scrape_reuters_rating(&page("https://www.reuters.com/article/idUSKCN2242AK", html.clone())).unwrap();
        prop_assert!(snopes.rating.is_missing());
        prop_assert!(reuters.rating.is_missing());
        let again = scrape_snopes_rating(&page("https://www.snopes.com/fact-check/x/", html)).unwrap();
        prop_assert_eq!(again, snopes);
    }
}

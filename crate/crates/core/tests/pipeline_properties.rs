use ltg_core::{
    embed_sequence, fit_exponential_law, fit_power_law, gapelmaper, select_fit_lags, tokenize,
    AutocorrelationCurve, EmbeddingTable, GridMode,
};
use proptest::prelude::*;

fn table_strategy() -> impl Strategy<Value = Vec<(String, Vec<f64>)>> {
    (1usize..6).prop_flat_map(|d| {
        prop::collection::vec(
            prop::collection::vec(-5.0f64..5.0, d).prop_filter("nonzero", |v| {
                v.iter().map(|c| c * c).sum::<f64>() > 1e-6
            }),
            1..12,
        )
        .prop_map(|vectors| {
            vectors
                .into_iter()
                .enumerate()
                .map(|(i, v)| (format!("w{i}"), v))
                .collect()
        })
    })
}

fn curve_from(f: impl Fn(f64) -> f64, tau_max: usize) -> AutocorrelationCurve {
    AutocorrelationCurve::from_values((1..=tau_max).map(|t| f(t as f64)).collect(), 2 * tau_max)
}

proptest! {
    #[test]
    fn embedding_yields_unit_vectors(
        entries in table_strategy(),
        picks in prop::collection::vec(0usize..20, 1..200),
    ) {
        let table = EmbeddingTable::from_entries("t", entries.clone()).unwrap();
        let text: Vec<String> = picks.iter().map(|i| format!("w{i}")).collect();
        let tokens = tokenize(&text.join(" "));
        let in_vocab = tokens.tokens.iter().filter(|t| table.contains(t)).count();
        match embed_sequence(&tokens, &table) {
            Ok(seq) => {
                prop_assert_eq!(seq.len(), in_vocab);
                for v in seq.iter() {
                    let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
                    prop_assert!((norm - 1.0).abs() < 1e-9);
                }
                let expected_drop = (tokens.len() - in_vocab) as f64 / tokens.len() as f64;
                prop_assert_eq!(seq.dropped_oov_fraction(), expected_drop);
            }
            Err(e) => {
                prop_assert_eq!(in_vocab, 0);
                prop_assert_eq!(e.code(), "EmptyVocabularyOverlap");
            }
        }
    }

    #[test]
    fn embedding_is_scale_free(
        entries in table_strategy(),
        scale in 1e-3f64..1e3,
        picks in prop::collection::vec(0usize..12, 1..100),
    ) {
        let table = EmbeddingTable::from_entries("t", entries.clone()).unwrap();
        let scaled = EmbeddingTable::from_entries(
            "t",
            entries.iter().map(|(w, v)| (w.clone(), v.iter().map(|c| c * scale).collect())),
        )
        .unwrap();
        let text: Vec<String> = picks.iter().map(|i| format!("w{i}")).collect();
        let tokens = tokenize(&text.join(" "));
        if let (Ok(a), Ok(b)) = (embed_sequence(&tokens, &table), embed_sequence(&tokens, &scaled)) {
            for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
                prop_assert!((x - y).abs() < 1e-9);
            }
            let again = embed_sequence(&tokens, &table).unwrap();
            prop_assert_eq!(a, again);
        }
    }

    #[test]
    fn tokens_are_clean(text in "\\PC{0,200}") {
        let seq = tokenize(&text);
        prop_assert_eq!(seq.tokens.len(), seq.source_char_offsets.len());
        for tok in &seq.tokens {
            prop_assert!(!tok.is_empty());
            prop_assert!(!tok.chars().any(char::is_whitespace));
        }
        prop_assert!(seq.source_char_offsets.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn mape_is_scale_invariant(
        alpha in 0.05f64..1.5,
        noise_amp in 0.0f64..0.3,
        factor in 0.01f64..100.0,
    ) {
        let base = |t: f64| t.powf(-alpha) * (1.0 + noise_amp * (t * 0.37).sin().abs());
        let curve = curve_from(base, 2000);
        let scaled = curve_from(|t| factor * base(t), 2000);
        let sel = select_fit_lags(&curve, 10, 2000, GridMode::Geometric20).unwrap();
        let sel_scaled = select_fit_lags(&scaled, 10, 2000, GridMode::Geometric20).unwrap();
        prop_assert_eq!(&sel.lags, &sel_scaled.lags);

        let p = fit_power_law(&curve, &sel).unwrap();
        let ps = fit_power_law(&scaled, &sel).unwrap();
        prop_assert!((p.slope - ps.slope).abs() < 1e-9);
        prop_assert!((ps.intercept - p.intercept - factor.ln()).abs() < 1e-9);
        prop_assert!((p.mape - ps.mape).abs() < 1e-9);

        let e = fit_exponential_law(&curve, &sel).unwrap();
        let es = fit_exponential_law(&scaled, &sel).unwrap();
        prop_assert!((e.mape - es.mape).abs() < 1e-9);

        let m = gapelmaper(&p, &e).unwrap();
        prop_assert_eq!(m.gapelmaper.to_bits(), (p.mape / e.mape).to_bits());
    }

    #[test]
    fn synthetic_laws_separate(alpha in 0.1f64..1.0, amp in 0.1f64..2.0, lambda in 2e-4f64..2e-3) {
        let power = curve_from(|t| amp * t.powf(-alpha), 10000);
        let sel = select_fit_lags(&power, 10, 10000, GridMode::Geometric20).unwrap();
        let m = gapelmaper(&fit_power_law(&power, &sel).unwrap(), &fit_exponential_law(&power, &sel).unwrap()).unwrap();
        prop_assert!(m.gapelmaper < 0.1, "power {}", m.gapelmaper);

        let exp = curve_from(|t| amp * (-lambda * t).exp(), 10000);
        let sel = select_fit_lags(&exp, 10, 10000, GridMode::Geometric20).unwrap();
        let m = gapelmaper(&fit_power_law(&exp, &sel).unwrap(), &fit_exponential_law(&exp, &sel).unwrap()).unwrap();
        prop_assert!(m.gapelmaper > 10.0, "exp {}", m.gapelmaper);
    }
}

mod common;

use common::strategies::{app_model, dspec, hwspec};
use proptest::prelude::*;
use resdep_core::dsl::{parse_app_model, parse_depl, parse_dspec, parse_hwspec};

/// Adds comment lines and blank lines between the lines of `text`.
fn sprinkle(text: &str, marks: &[bool], comment: &str) -> String {
    let mut out = String::new();
    for (k, line) in text.lines().enumerate() {
        if marks.get(k).copied().unwrap_or(false) {
            out.push_str(comment);
            out.push_str(" noise ( ; } [x]\n\n");
        }
        out.push_str("  ");
        out.push_str(line);
        out.push('\n');
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn dspec_round_trips(spec in dspec()) {
        let printed = spec.to_string();
        prop_assert_eq!(parse_dspec(&printed).unwrap(), spec);
    }

    #[test]
    fn hwspec_round_trips(spec in hwspec()) {
        let printed = spec.to_string();
        prop_assert_eq!(parse_hwspec(&printed).unwrap(), spec);
    }

    #[test]
    fn app_model_round_trips(model in app_model()) {
        let printed = model.to_string();
        prop_assert_eq!(parse_app_model(&printed).unwrap(), model);
    }

    #[test]
    fn comments_do_not_change_dspec(spec in dspec(), marks in prop::collection::vec(any::<bool>(), 0..20)) {
        let noisy = sprinkle(&spec.to_string(), &marks, "//");
        prop_assert_eq!(parse_dspec(&noisy).unwrap(), spec);
    }

    #[test]
    fn comments_do_not_change_hwspec(spec in hwspec(), marks in prop::collection::vec(any::<bool>(), 0..30)) {
        let noisy = sprinkle(&spec.to_string(), &marks, "#");
        prop_assert_eq!(parse_hwspec(&noisy).unwrap(), spec);
    }

    #[test]
    fn comments_do_not_change_app_model(model in app_model(), marks in prop::collection::vec(any::<bool>(), 0..30)) {
        let noisy = sprinkle(&model.to_string(), &marks, "#");
        prop_assert_eq!(parse_app_model(&noisy).unwrap(), model);
    }

    #[test]
    fn parsers_never_panic(text in "\\PC{0,200}") {
        let _ = parse_dspec(&text);
        let _ = parse_hwspec(&text);
        let _ = parse_app_model(&text);
        let _ = parse_depl(&text);
    }

    #[test]
    fn parsers_never_panic_on_near_misses(spec in dspec(), cut in 0usize..400, junk in "[(){};,=\\[\\]a-z0-9 \n]{0,6}") {
        let printed = spec.to_string();
        let at = printed.char_indices().map(|(i, _)| i).nth(cut).unwrap_or(printed.len());
        let mangled = format!("{}{}{}", &printed[..at], junk, &printed[at..]);
        let _ = parse_dspec(&mangled);
        let _ = parse_app_model(&mangled);
        let _ = parse_hwspec(&mangled);
    }
}

mod support;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sqmeter_core::{match_normal, verify_recovery, Engine, HashParams, Session, StoredProfile, SubmitStatus};
use support::gen::{flip_case, random_answer};

fn engine() -> Engine {
    Engine::builtin().with_hash_params(HashParams::minimal())
}

/// Fills a session with the given answers, confirming any that pend.
fn fill(e: &Engine, rng: &mut ChaCha8Rng, answers: &[String; 5]) -> Session {
    let mut s = e.create_session();
    let mut ids: Vec<&str> = e.catalog().questions().iter().map(|q| q.id.as_str()).collect();
    for slot in 1..=3u8 {
        let id = ids.remove(rng.random_range(0..ids.len()));
        e.select_predefined(&mut s, slot, id).unwrap();
    }
    e.set_custom_question(&mut s, 4, &format!("Custom question {}?", rng.random::<u32>())).unwrap();
    e.set_custom_question(&mut s, 5, "Who sat next to me in first grade?").unwrap();
    for (i, a) in answers.iter().enumerate() {
        let slot = i as u8 + 1;
        if e.submit_answer(&mut s, slot, a).unwrap().status == SubmitStatus::WeakNeedsConfirmation {
            e.confirm_weak(&mut s, slot, a).unwrap();
        }
    }
    s
}

fn finalize_random(e: &Engine, rng: &mut ChaCha8Rng) -> ([String; 5], StoredProfile) {
    let answers: [String; 5] = std::array::from_fn(|_| {
        if rng.random_bool(0.2) {
            ["blue", "cricket", "max", "summer"][rng.random_range(0..4)].to_owned()
        } else {
            random_answer(rng)
        }
    });
    let mut s = fill(e, rng, &answers);
    let threshold = rng.random_range(1..=5u8);
    let profile = e.finalize(&mut s, threshold).unwrap();
    (answers, profile)
}

#[test]
fn randomized_round_trips() {
    let e = engine();
    let mut rng = ChaCha8Rng::seed_from_u64(0xfeed_0001);
    for _ in 0..100 {
        let (answers, profile) = finalize_random(&e, &mut rng);
        let k = profile.recovery_threshold as usize;

        let all = answers.clone().map(Some);
        let out = verify_recovery(&profile, &all);
        assert!(out.granted && out.correct_count == 5);

        let mut order: Vec<usize> = (0..5).collect();
        for i in (1..5).rev() {
            order.swap(i, rng.random_range(0..=i));
        }
        let exactly: [Option<String>; 5] =
            std::array::from_fn(|i| order[..k].contains(&i).then(|| answers[i].clone()));
        let out = verify_recovery(&profile, &exactly);
        assert!(out.granted && out.correct_count as usize == k);

        if k > 1 {
            let below: [Option<String>; 5] =
                std::array::from_fn(|i| order[..k - 1].contains(&i).then(|| answers[i].clone()));
            assert!(!verify_recovery(&profile, &below).granted);
        }

        let flipped = answers.clone().map(|a| Some(flip_case(&a)));
        assert_eq!(verify_recovery(&profile, &flipped).correct_count, 0);

        let padded = answers.clone().map(|a| Some(format!("  {a}\t")));
        assert_eq!(verify_recovery(&profile, &padded).correct_count, 5);
    }
}

#[test]
fn default_threshold_three_of_five() {
    let e = engine();
    let mut rng = ChaCha8Rng::seed_from_u64(0xfeed_0002);
    let answers: [String; 5] = std::array::from_fn(|_| random_answer(&mut rng));
    let mut s = fill(&e, &mut rng, &answers);
    let profile = e.finalize(&mut s, sqmeter_core::profile::DEFAULT_THRESHOLD).unwrap();
    for mask in 0u8..32 {
        let attempt: [Option<String>; 5] =
            std::array::from_fn(|i| (mask >> i & 1 == 1).then(|| answers[i].clone()));
        let n = mask.count_ones();
        assert_eq!(verify_recovery(&profile, &attempt).granted, n >= 3, "mask {mask:05b}");
    }
}

#[test]
fn serialized_profiles_hold_no_answers() {
    let e = engine();
    let mut rng = ChaCha8Rng::seed_from_u64(0xfeed_0003);
    for _ in 0..100 {
        let (answers, profile) = finalize_random(&e, &mut rng);
        let json = serde_json::to_string(&profile).unwrap();
        let pretty = serde_json::to_string_pretty(&profile).unwrap();
        for a in &answers {
            let normal = match_normal(a);
            assert!(!json.contains(&normal) && !pretty.contains(&normal), "{normal:?} leaked");
        }
        let back: StoredProfile = serde_json::from_str(&json).unwrap();
        assert_eq!(back, profile);
        back.validate().unwrap();
        for (entry, _) in profile.entries.iter().zip(&answers) {
            assert_eq!(entry.weak_override, entry.band_at_save == sqmeter_core::Band::Weak);
        }
    }
}

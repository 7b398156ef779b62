use cfdim::verify::{run_suite, RunConfig, Sizes};
use cfdim::{Error, Status};

fn quick(seed: u64) -> RunConfig {
    RunConfig { seed, sizes: Sizes::quick(), ..RunConfig::default() }
}

#[test]
fn quick_run_is_clean_and_reproducible() {
    let a = run_suite("all", &quick(5)).unwrap();
    let b = run_suite("all", &quick(5)).unwrap();
    assert_eq!(a.to_json(), b.to_json());
    assert!(a.ok(), "{}", a.to_json());
    let ids: Vec<&str> = a.claims.iter().map(|c| c.id.as_str()).collect();
    let mut sorted = ids.clone();
    sorted.sort();
    sorted.dedup();
    assert_eq!(ids, sorted);
    assert!(a.claims.iter().all(|c| !c.anchor.is_empty()));
    assert!(a.claims.iter().all(|c| c.ms.is_none()));
}

#[test]
fn seeds_change_corpora() {
    let a = run_suite("measure-bounds", &quick(1)).unwrap();
    let b = run_suite("measure-bounds", &quick(2)).unwrap();
    assert_ne!(a.to_json(), b.to_json());
    assert_eq!(a.count(Status::Proved), a.claims.len());
}

#[test]
fn unknown_suites_and_bad_limits() {
    assert!(matches!(run_suite("bogus", &quick(0)), Err(Error::UnknownSuite(_))));
    let bad = RunConfig { truncation: 0, ..quick(0) };
    assert!(run_suite("kraaikamp", &bad).is_err());
}

#[test]
fn timing_is_opt_in() {
    let cfg = RunConfig { timing: true, ..quick(0) };
    let r = run_suite("kraaikamp", &cfg).unwrap();
    assert!(r.claims.iter().all(|c| c.ms.is_some()));
    assert!(r.to_csv().lines().nth(1).is_some_and(|l| !l.ends_with(',')));
}

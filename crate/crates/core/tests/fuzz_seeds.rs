//! Replays the checked-in fuzz corpora, plus cheap byte mutations of each
//! seed, through the same properties the fuzz targets check.

use std::fs;
use std::path::PathBuf;

use tumour_damage::config::{parse_config, serialize_config};
use tumour_damage::rng::Lcg;
use tumour_damage::snapshot::parse_snapshot;

fn corpus(target: &str) -> Vec<Vec<u8>> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut seeds: Vec<Vec<u8>> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| fs::read(e.unwrap().path()).unwrap())
        .collect();
    assert!(!seeds.is_empty());
    seeds.sort();
    seeds
}

fn below(rng: &mut Lcg, n: usize) -> usize {
    (rng.next_u64() % n as u64) as usize
}

fn mutants(seed: &[u8], rng: &mut Lcg) -> Vec<Vec<u8>> {
    const BYTES: &[u8] = b"0123456789.,-=e\n\x0c#()abinfNa ";
    let mut out = vec![seed.to_vec()];
    for _ in 0..300 {
        let mut m = seed.to_vec();
        for _ in 0..1 + below(rng, 4) {
            if m.is_empty() {
                break;
            }
            let at = below(rng, m.len());
            match below(rng, 3) {
                0 => m[at] = BYTES[below(rng, BYTES.len())],
                1 => {
                    m.remove(at);
                }
                _ => m.insert(at, BYTES[below(rng, BYTES.len())]),
            }
        }
        out.push(m);
    }
    out
}

fn check_config(data: &[u8]) {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cfg) = parse_config(text) {
        let again = parse_config(&serialize_config(&cfg)).expect("serialised config reparses");
        assert_eq!(serialize_config(&again), serialize_config(&cfg));
    }
}

fn check_snapshot(data: &[u8]) {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let mut parts = text.splitn(3, '\x0c');
    if let (Some(c), Some(n), Some(m)) = (parts.next(), parts.next(), parts.next()) {
        let _ = parse_snapshot(c, n, m);
    }
}

#[test]
fn config_corpus_and_mutants() {
    let mut rng = Lcg::new(11);
    let seeds = corpus("parse_config");
    assert!(seeds.iter().any(|s| parse_config(std::str::from_utf8(s).unwrap()).is_ok()));
    for seed in &seeds {
        for m in mutants(seed, &mut rng) {
            check_config(&m);
        }
    }
}

#[test]
fn snapshot_corpus_and_mutants() {
    let mut rng = Lcg::new(12);
    let seeds = corpus("read_snapshot");
    let parses = |s: &Vec<u8>| {
        let text = std::str::from_utf8(s).unwrap();
        let v: Vec<&str> = text.splitn(3, '\x0c').collect();
        v.len() == 3 && parse_snapshot(v[0], v[1], v[2]).is_ok()
    };
    assert!(seeds.iter().any(parses));
    assert!(!seeds.iter().all(parses));
    for seed in &seeds {
        for m in mutants(seed, &mut rng) {
            check_snapshot(&m);
        }
    }
}

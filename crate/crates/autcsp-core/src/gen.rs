//! Seeded construction of automata, tables, and instances. Everything here
//! is deterministic in the seed; the test suites and the CLI `generate`
//! command both build on it.
//!
//! Besides uniformly random automata, there are two structured families
//! whose languages are closed under a chosen operation by construction:
//! block languages `B*` with a block set closed under the operation, and
//! linear-congruential languages over GF(q), which are affine and hence
//! closed under `f_q(x,y,z) = x − y + z`.

use std::collections::BTreeMap;
use std::collections::HashMap;

use crate::automaton::{Automaton, Transition};
use crate::domain::{words_of_length, Domain, Sym, Word};
use crate::instance::{Constraint, Instance};
use crate::ops::OperationTable;
use crate::rng::SplitMix64;

/// A uniformly random NFA: up to `max_states` states, sparse transitions,
/// possibly several initial states.
pub fn random_automaton(rng: &mut SplitMix64, max_states: usize, domain: &Domain) -> Automaton {
    let n = rng.range(1, max_states);
    let mut transitions = Vec::new();
    for s in 0..n as u32 {
        for d in domain.syms() {
            let succs = match rng.below(8) {
                0 | 1 => 0,
                2..=5 => 1,
                _ => 2,
            };
            for _ in 0..succs {
                transitions.push(Transition { from: s, sym: d, to: rng.below(n) as u32 });
            }
        }
    }
    let mut initial = vec![rng.below(n) as u32];
    if rng.chance(1, 4) {
        initial.push(rng.below(n) as u32);
    }
    let accepting: Vec<u32> = (0..n as u32).filter(|_| rng.chance(1, 2)).collect();
    let names = (0..n).map(|i| format!("q{i}")).collect();
    Automaton::new(domain.clone(), names, initial, accepting, transitions)
        .expect("generated automaton is well formed")
}

/// Trie automaton of an explicit finite language.
pub fn automaton_from_words(domain: &Domain, words: &[Word]) -> Automaton {
    let mut nodes: Vec<HashMap<Sym, u32>> = vec![HashMap::new()];
    let mut accepting = Vec::new();
    for w in words {
        let mut cur = 0u32;
        for &d in w {
            cur = match nodes[cur as usize].get(&d) {
                Some(&next) => next,
                None => {
                    let next = nodes.len() as u32;
                    nodes[cur as usize].insert(d, next);
                    nodes.push(HashMap::new());
                    next
                }
            };
        }
        accepting.push(cur);
    }
    let mut transitions = Vec::new();
    for (from, edges) in nodes.iter().enumerate() {
        for (&sym, &to) in edges {
            transitions.push(Transition { from: from as u32, sym, to });
        }
    }
    let names = (0..nodes.len()).map(|i| format!("n{i}")).collect();
    Automaton::new(domain.clone(), names, vec![0], accepting, transitions)
        .expect("trie automaton is well formed")
}

/// Automaton for `B*` where `B` is a set of equal-length blocks. An empty
/// block set yields the language `{ε}`.
pub fn block_star_automaton(domain: &Domain, blocks: &[Word]) -> Automaton {
    if blocks.is_empty() {
        return Automaton::new(domain.clone(), vec!["r".into()], vec![0], vec![0], vec![])
            .unwrap();
    }
    let b = blocks[0].len();
    assert!(b >= 1 && blocks.iter().all(|w| w.len() == b), "blocks must share a length >= 1");
    // prefix-tree states for proper prefixes; the final symbol loops back
    let mut ids: HashMap<Vec<Sym>, u32> = HashMap::new();
    ids.insert(Vec::new(), 0);
    let mut transitions = Vec::new();
    for block in blocks {
        for i in 0..b {
            let from = ids[&block[..i].to_vec()];
            let to = if i + 1 == b {
                0
            } else {
                let key = block[..i + 1].to_vec();
                let next_id = ids.len() as u32;
                *ids.entry(key).or_insert(next_id)
            };
            transitions.push(Transition { from, sym: block[i], to });
        }
    }
    let names = (0..ids.len()).map(|i| format!("b{i}")).collect();
    Automaton::new(domain.clone(), names, vec![0], vec![0], transitions)
        .expect("block automaton is well formed")
}

/// Closes a block set under the given operations (applied columnwise),
/// returning the closure sorted and deduplicated.
pub fn close_blocks(mut blocks: Vec<Word>, ops: &[&OperationTable]) -> Vec<Word> {
    blocks.sort();
    blocks.dedup();
    loop {
        let mut fresh: Vec<Word> = Vec::new();
        for op in ops {
            let k = op.arity();
            let mut idx = vec![0usize; k];
            if blocks.is_empty() {
                break;
            }
            'tuples: loop {
                let args: Vec<&[Sym]> = idx.iter().map(|&i| blocks[i].as_slice()).collect();
                let image = op.apply_words(&args);
                if blocks.binary_search(&image).is_err() && !fresh.contains(&image) {
                    fresh.push(image);
                }
                for pos in (0..k).rev() {
                    idx[pos] += 1;
                    if idx[pos] < blocks.len() {
                        continue 'tuples;
                    }
                    idx[pos] = 0;
                }
                break;
            }
        }
        if fresh.is_empty() {
            return blocks;
        }
        blocks.extend(fresh);
        blocks.sort();
        blocks.dedup();
    }
}

/// A random `B*` language whose block set is closed under the given
/// operations.
pub fn random_block_automaton(
    rng: &mut SplitMix64,
    domain: &Domain,
    block_len: usize,
    ops: &[&OperationTable],
) -> Automaton {
    let universe: Vec<Word> = words_of_length(domain.size(), block_len).collect();
    let seeds: Vec<Word> =
        universe.into_iter().filter(|_| rng.chance(1, 3)).collect();
    let blocks = close_blocks(seeds, ops);
    block_star_automaton(domain, &blocks)
}

/// A random linear-congruential automaton over GF(q): states are vectors of
/// GF(q)^dim, reading digit `d` maps `s` to `M·s + d·v + w`, and acceptance
/// is a random affine condition `u·s = t`. Every length slice of the
/// language is an affine subspace, so `f_q` is a polymorphism.
pub fn random_affine_automaton(rng: &mut SplitMix64, q: u16, dim: usize) -> Automaton {
    let domain = Domain::gf(q).expect("q >= 2");
    let qs = q as usize;
    let states = qs.pow(dim as u32);
    let rand_vec = |rng: &mut SplitMix64| -> Vec<u16> {
        (0..dim).map(|_| rng.below(qs) as u16).collect()
    };
    let matrix: Vec<Vec<u16>> = (0..dim).map(|_| rand_vec(rng)).collect();
    let v = rand_vec(rng);
    let w = rand_vec(rng);
    let u = rand_vec(rng);
    let t = rng.below(qs) as u16;
    let s0 = rng.below(states);
    let decode = |mut code: usize| -> Vec<u16> {
        let mut out = vec![0u16; dim];
        for slot in out.iter_mut().rev() {
            *slot = (code % qs) as u16;
            code /= qs;
        }
        out
    };
    let encode = |vecq: &[u16]| -> usize {
        vecq.iter().fold(0usize, |acc, &x| acc * qs + x as usize)
    };
    let mut transitions = Vec::new();
    for code in 0..states {
        let s = decode(code);
        for d in 0..q {
            let mut next = vec![0u16; dim];
            for (i, row) in matrix.iter().enumerate() {
                let mut acc = 0u32;
                for (j, &m) in row.iter().enumerate() {
                    acc += m as u32 * s[j] as u32;
                }
                acc += d as u32 * v[i] as u32 + w[i] as u32;
                next[i] = (acc % q as u32) as u16;
            }
            transitions.push(Transition {
                from: code as u32,
                sym: d as Sym,
                to: encode(&next) as u32,
            });
        }
    }
    let accepting: Vec<u32> = (0..states)
        .filter(|&code| {
            let s = decode(code);
            let dot: u32 = u.iter().zip(&s).map(|(&a, &b)| a as u32 * b as u32).sum();
            dot % q as u32 == t as u32
        })
        .map(|c| c as u32)
        .collect();
    let names = (0..states).map(|i| format!("g{i}")).collect();
    Automaton::new(domain, names, vec![s0 as u32], accepting, transitions)
        .expect("affine automaton is well formed")
}

/// A uniformly random total operation table.
pub fn random_table(rng: &mut SplitMix64, domain: &Domain, arity: usize) -> OperationTable {
    let rows = domain.size().pow(arity as u32);
    let values: Vec<Sym> = (0..rows).map(|_| rng.below(domain.size()) as Sym).collect();
    OperationTable::new(domain.clone(), arity, values).expect("random table is total")
}

/// A random instance over the given automaton: seeded scopes with repeated
/// variables allowed, and optionally random unary domain lines.
pub fn random_instance(
    rng: &mut SplitMix64,
    automaton: Automaton,
    vars: usize,
    constraints: usize,
    min_arity: usize,
    max_arity: usize,
    domain_line_chance_percent: u64,
) -> Instance {
    let names: Vec<String> = (0..vars).map(|i| format!("v{i}")).collect();
    let mut cs = Vec::with_capacity(constraints);
    for _ in 0..constraints {
        let arity = rng.range(min_arity, max_arity);
        let scope: Vec<usize> = (0..arity).map(|_| rng.below(vars)).collect();
        cs.push(Constraint { scope });
    }
    let mut domain_constraints = BTreeMap::new();
    let d = automaton.domain().size();
    for v in 0..vars {
        if rng.chance(domain_line_chance_percent, 100) {
            let mut mask = 0u64;
            for s in 0..d {
                if rng.chance(2, 3) {
                    mask |= 1 << s;
                }
            }
            domain_constraints.insert(v, mask);
        }
    }
    Instance::new(names, cs, automaton, domain_constraints)
        .expect("generated instance is well formed")
}

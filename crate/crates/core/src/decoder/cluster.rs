use std::collections::HashMap;

use super::DecoderGraph;

/// Pre-decoder over clusters of at most `max_weight` faults.
///
/// The table maps a syndrome signature to the lightest fault set (by prior
/// weight, ties to the lexicographically smallest index list) of at most
/// `max_weight` faults with that signature. Only the single-fault part is
/// stored; larger entries are resolved on demand by branching on the faults
/// that touch the smallest fired detector, which yields the same map without
/// materialising every pair.
///
/// A syndrome is split into components of fired detectors that lie within
/// `max_weight` hops of each other in the detector graph; each component is
/// looked up on its own and a miss on any of them is a miss overall.
pub struct ClusterTable {
    max_weight: usize,
    singles: HashMap<Vec<u32>, u32>,
    /// Detectors within `max_weight` hops, excluding the detector itself.
    reach: Vec<Vec<u32>>,
    /// Largest signature `max_weight` faults can produce.
    max_signature: usize,
}

impl ClusterTable {
    pub fn new(graph: &DecoderGraph, max_weight: usize) -> Self {
        let mut singles: HashMap<Vec<u32>, u32> = HashMap::new();
        for f in 0..graph.num_faults() {
            let sig = graph.fault_detectors(f);
            if sig.is_empty() {
                continue;
            }
            singles
                .entry(sig.to_vec())
                .and_modify(|best| {
                    if graph.priors()[f] < graph.priors()[*best as usize] {
                        *best = f as u32;
                    }
                })
                .or_insert(f as u32);
        }
        let m = graph.num_detectors();
        let mut neighbors = vec![Vec::new(); m];
        for (d, nb) in neighbors.iter_mut().enumerate() {
            for &f in graph.detector_faults(d) {
                nb.extend(graph.fault_detectors(f as usize).iter().copied().filter(|&e| e as usize != d));
            }
            nb.sort_unstable();
            nb.dedup();
        }
        let mut stamp = vec![usize::MAX; m];
        let reach = (0..m)
            .map(|d| {
                stamp[d] = d;
                let mut out = Vec::new();
                let mut frontier = vec![d as u32];
                for _ in 0..max_weight {
                    let mut next = Vec::new();
                    for &u in &frontier {
                        for &v in &neighbors[u as usize] {
                            if stamp[v as usize] != d {
                                stamp[v as usize] = d;
                                next.push(v);
                            }
                        }
                    }
                    out.extend_from_slice(&next);
                    frontier = next;
                }
                out.sort_unstable();
                out
            })
            .collect();
        let widest = (0..graph.num_faults()).map(|f| graph.fault_detectors(f).len()).max().unwrap_or(0);
        Self { max_weight, singles, reach, max_signature: widest * max_weight }
    }

    pub fn max_weight(&self) -> usize {
        self.max_weight
    }

    /// The lightest set of at most `max_weight` faults with exactly this
    /// signature.
    pub fn lookup_signature(&self, graph: &DecoderGraph, signature: &[u32]) -> Option<Vec<usize>> {
        if signature.is_empty() {
            return Some(Vec::new());
        }
        self.search(graph, signature, self.max_weight).map(|(_, mut set)| {
            set.sort_unstable();
            set
        })
    }

    fn search(&self, graph: &DecoderGraph, sig: &[u32], w: usize) -> Option<(f64, Vec<usize>)> {
        if w == 0 {
            return None;
        }
        let mut best: Option<(f64, Vec<usize>)> = self.singles.get(sig).map(|&f| (graph.priors()[f as usize], vec![f as usize]));
        if w == 1 {
            return best;
        }
        for &f in graph.detector_faults(sig[0] as usize) {
            let f = f as usize;
            let rest = symmetric_difference(sig, graph.fault_detectors(f));
            if rest.is_empty() {
                continue;
            }
            let Some((_, sub)) = self.search(graph, &rest, w - 1) else { continue };
            if sub.contains(&f) {
                continue;
            }
            let mut set = sub;
            set.push(f);
            set.sort_unstable();
            let weight = graph.weight_of(&set);
            let better = match &best {
                None => true,
                Some((bw, bs)) => weight < *bw || (weight == *bw && set < *bs),
            };
            if better {
                best = Some((weight, set));
            }
        }
        best
    }

    /// Pre-decodes a full syndrome, or `None` on a miss.
    pub fn lookup(&self, graph: &DecoderGraph, syndrome: &[bool]) -> Option<Vec<usize>> {
        let fired: Vec<u32> = syndrome.iter().enumerate().filter(|(_, &s)| s).map(|(d, _)| d as u32).collect();
        if fired.is_empty() {
            return Some(Vec::new());
        }
        if self.max_weight == 0 {
            return None;
        }
        let comps = self.components(syndrome, &fired);
        if comps.iter().any(|c| c.len() > self.max_signature) {
            return None;
        }
        let mut correction = Vec::new();
        for comp in comps {
            correction.extend(self.lookup_signature(graph, &comp)?);
        }
        correction.sort_unstable();
        // Two components may pick the same fault; the union must still match.
        let mut dedup = Vec::with_capacity(correction.len());
        for f in correction {
            if dedup.last() == Some(&f) {
                dedup.pop();
            } else {
                dedup.push(f);
            }
        }
        (graph.syndrome_of(&dedup) == syndrome).then_some(dedup)
    }

    fn components(&self, syndrome: &[bool], fired: &[u32]) -> Vec<Vec<u32>> {
        let mut index = vec![u32::MAX; syndrome.len()];
        for (i, &d) in fired.iter().enumerate() {
            index[d as usize] = i as u32;
        }
        let mut parent: Vec<usize> = (0..fired.len()).collect();
        fn find(p: &mut [usize], mut i: usize) -> usize {
            while p[i] != i {
                p[i] = p[p[i]];
                i = p[i];
            }
            i
        }
        for (i, &d) in fired.iter().enumerate() {
            for &v in &self.reach[d as usize] {
                let j = index[v as usize];
                if j != u32::MAX {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j as usize));
                    parent[a] = b;
                }
            }
        }
        let mut groups: Vec<Vec<u32>> = vec![Vec::new(); fired.len()];
        for (i, &d) in fired.iter().enumerate() {
            let r = find(&mut parent, i);
            groups[r].push(d);
        }
        groups.retain(|g| !g.is_empty());
        groups
    }
}

fn symmetric_difference(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

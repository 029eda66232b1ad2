//! Linear maps of `{0,1}^len` that preserve the forbidden-difference predicate.
//! Each such map is an automorphism of the conflict graph that fixes `0`, so
//! a root branch settles its whole orbit.

/// Cap on the automorphisms collected; orbits come from the group they generate.
const MAX_MAPS: usize = 64;
/// Cap on backtracking nodes; the search stops early rather than stall.
const MAX_NODES: u64 = 200_000;
/// Above this length the per-word invariants cost more than they save.
pub(super) const MAX_SYMMETRY_LENGTH: usize = 16;

struct Backtrack<'a> {
    invariant: &'a [u64],
    basis: Vec<usize>,
    src: Vec<usize>,
    img: Vec<usize>,
    used: Vec<bool>,
    found: Vec<Vec<usize>>,
    nodes: u64,
}

impl Backtrack<'_> {
    fn run(&mut self, k: usize) {
        if self.found.len() >= MAX_MAPS || self.nodes >= MAX_NODES {
            return;
        }
        self.nodes += 1;
        if k == self.basis.len() {
            self.found.push(self.img.clone());
            return;
        }
        let b = self.basis[k];
        let half = self.src.len();
        for c in 1..self.invariant.len() {
            if self.invariant[c] != self.invariant[b] || self.used[c] {
                continue;
            }
            let fits = (0..half).all(|s| {
                let im = self.img[s] ^ c;
                !self.used[im] && self.invariant[self.src[s] ^ b] == self.invariant[im]
            });
            if !fits {
                continue;
            }
            for s in 0..half {
                let (from, to) = (self.src[s] ^ b, self.img[s] ^ c);
                self.src.push(from);
                self.img.push(to);
                self.used[to] = true;
            }
            self.run(k + 1);
            for s in half..self.src.len() {
                self.used[self.img[s]] = false;
            }
            self.src.truncate(half);
            self.img.truncate(half);
            if self.found.len() >= MAX_MAPS || self.nodes >= MAX_NODES {
                return;
            }
        }
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Orbit label (smallest member) of every word under the automorphisms found.
/// Falls back to singleton orbits when none beyond the identity turn up.
pub(super) fn orbits(length: usize, forbidden: impl Fn(u64) -> bool) -> Vec<usize> {
    let size = 1usize << length;
    let forb: Vec<bool> = (0..size as u64).map(&forbidden).collect();
    let fset: Vec<usize> = (0..size).filter(|&v| forb[v]).collect();
    // Preserved by every automorphism: membership and how often the word
    // splits as a sum of two forbidden words.
    let invariant: Vec<u64> = (0..size)
        .map(|v| {
            let splits = fset.iter().filter(|&&f| forb[v ^ f]).count() as u64;
            splits << 1 | forb[v] as u64
        })
        .collect();

    let mut class_size = std::collections::HashMap::new();
    for &inv in &invariant[1..] {
        *class_size.entry(inv).or_insert(0usize) += 1;
    }
    let mut candidates: Vec<usize> = (1..size).collect();
    candidates.sort_by_key(|&v| (class_size[&invariant[v]], v));
    let mut basis = Vec::new();
    let mut span = vec![0usize];
    let mut in_span = vec![false; size];
    in_span[0] = true;
    for v in candidates {
        if basis.len() == length {
            break;
        }
        if !in_span[v] {
            let more: Vec<usize> = span.iter().map(|&s| s ^ v).collect();
            for &m in &more {
                in_span[m] = true;
            }
            span.extend(more);
            basis.push(v);
        }
    }

    let mut bt = Backtrack {
        invariant: &invariant,
        basis,
        src: vec![0],
        img: vec![0],
        used: vec![false; size],
        found: Vec::new(),
        nodes: 0,
    };
    bt.used[0] = true;
    bt.run(0);

    // `src` ends as the full span in the same order as each stored `img`.
    let mut coord = vec![0usize; size];
    {
        let mut src = vec![0usize];
        for &b in &bt.basis {
            let more: Vec<usize> = src.iter().map(|&s| s ^ b).collect();
            src.extend(more);
        }
        for (i, &s) in src.iter().enumerate() {
            coord[s] = i;
        }
    }
    let mut parent: Vec<usize> = (0..size).collect();
    for img in &bt.found {
        for x in 0..size {
            let (a, b) = (find(&mut parent, x), find(&mut parent, img[coord[x]]));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    (0..size).map(|x| find(&mut parent, x)).collect()
}

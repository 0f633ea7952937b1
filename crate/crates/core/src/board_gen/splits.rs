use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{BufRead, Write};
use std::sync::OnceLock;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    anchors, colorings, enumerate_objects, generate_board, make_combo, objects_for_seed, seeds, BoardRecord, BoardType,
    GenError, ObjectSpec, ObjectType, Seed, SeedKind, Split,
};
use crate::grid::Color;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    SimpleSimple,
    RegularSimple,
    RegularComplex,
}

impl Category {
    pub const ALL: [Category; 3] = [Category::SimpleSimple, Category::RegularSimple, Category::RegularComplex];

    pub fn seed_kind(self) -> SeedKind {
        match self {
            Category::SimpleSimple => SeedKind::SimpleObject,
            Category::RegularSimple => SeedKind::RegularSimple,
            Category::RegularComplex => SeedKind::RegularComplex,
        }
    }

    pub fn board_type(self) -> BoardType {
        match self {
            Category::SimpleSimple => BoardType::Simple,
            _ => BoardType::Regular,
        }
    }

    pub fn object_type(self) -> ObjectType {
        match self {
            Category::RegularComplex => ObjectType::Complex,
            _ => ObjectType::Simple,
        }
    }

    pub fn of(board_type: BoardType, object_type: ObjectType) -> Category {
        match (board_type, object_type) {
            (BoardType::Simple, _) => Category::SimpleSimple,
            (BoardType::Regular, ObjectType::Simple) => Category::RegularSimple,
            (BoardType::Regular, ObjectType::Complex) => Category::RegularComplex,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Category::SimpleSimple => "simple_simple",
            Category::RegularSimple => "regular_simple",
            Category::RegularComplex => "regular_complex",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitCounts {
    pub train: usize,
    pub val: usize,
    pub test: usize,
}

impl SplitCounts {
    pub fn get(&self, split: Split) -> usize {
        match split {
            Split::Train => self.train,
            Split::Val => self.val,
            Split::Test => self.test,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitConfig {
    pub rng_seed: u64,
    pub simple_simple: SplitCounts,
    pub regular_simple: SplitCounts,
    pub regular_complex: SplitCounts,
}

impl Default for SplitConfig {
    fn default() -> Self {
        SplitConfig {
            rng_seed: 0,
            simple_simple: SplitCounts { train: 1072, val: 130, test: 130 },
            regular_simple: SplitCounts { train: 1168, val: 130, test: 130 },
            regular_complex: SplitCounts { train: 2944, val: 130, test: 130 },
        }
    }
}

impl SplitConfig {
    pub fn counts(&self, category: Category) -> SplitCounts {
        match category {
            Category::SimpleSimple => self.simple_simple,
            Category::RegularSimple => self.regular_simple,
            Category::RegularComplex => self.regular_complex,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SplitSet {
    pub records: Vec<BoardRecord>,
}

impl SplitSet {
    pub fn split(&self, split: Split) -> impl Iterator<Item = &BoardRecord> {
        self.records.iter().filter(move |r| r.split == split)
    }

    pub fn count(&self, category: Category, split: Split) -> usize {
        self.records
            .iter()
            .filter(|r| r.split == split && Category::of(r.board_type, r.object_type) == category)
            .count()
    }
}

/// One seed/object pair with all its colorings and anchors.
struct Block<'a> {
    seed: &'a Seed,
    object: &'a ObjectSpec,
    colorings: &'a [Vec<Color>],
    anchors: Vec<(usize, usize)>,
}

impl Block<'_> {
    fn size(&self) -> usize {
        self.colorings.len() * self.anchors.len()
    }
}

struct Space<'a> {
    blocks: Vec<Block<'a>>,
    /// Start offset of each block in the flat index space.
    starts: Vec<usize>,
    total: usize,
}

impl<'a> Space<'a> {
    fn new(
        kind: SeedKind,
        quadrants: &[(usize, usize)],
        objects: &'a [ObjectSpec],
        coloring_cache: &'a HashMap<usize, Vec<Vec<Color>>>,
    ) -> Space<'a> {
        let mut blocks = Vec::new();
        for seed in seeds().iter().filter(|s| s.kind == kind) {
            for object in objects_for_seed(seed, objects) {
                let idx = objects.iter().position(|o| std::ptr::eq(o, object)).expect("object from slice");
                let anchors: Vec<_> = quadrants.iter().flat_map(|q| anchors(seed, *q)).collect();
                blocks.push(Block { seed, object, colorings: &coloring_cache[&idx], anchors });
            }
        }
        let mut starts = Vec::with_capacity(blocks.len());
        let mut total = 0;
        for b in &blocks {
            starts.push(total);
            total += b.size();
        }
        Space { blocks, starts, total }
    }

    fn locate(&self, flat: usize) -> (&Block<'a>, usize) {
        let b = self.starts.partition_point(|&s| s <= flat) - 1;
        (&self.blocks[b], flat - self.starts[b])
    }

    fn record(&self, flat: usize) -> Result<BoardRecord, GenError> {
        let (block, k) = self.locate(flat);
        let n = block.anchors.len();
        let combo = make_combo(block.object, block.colorings[k / n].clone(), block.anchors[k % n]);
        generate_board(block.seed, &combo)
    }
}

struct ObjectTable {
    objects: Vec<ObjectSpec>,
    colorings: HashMap<usize, Vec<Vec<Color>>>,
}

/// Objects of the built-in catalog with their colorings, computed once.
fn object_table() -> &'static ObjectTable {
    static TABLE: OnceLock<ObjectTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let objects = enumerate_objects(seeds());
        let colorings = objects
            .iter()
            .enumerate()
            .map(|(i, o)| {
                let seed = super::seed_by_id(&o.seed_id).expect("object seeds come from the catalog");
                (i, colorings(seed, &o.shapes))
            })
            .collect();
        ObjectTable { objects, colorings }
    })
}

/// Number of distinct boards of a category inside the given split's
/// quadrants, or across the whole grid when `split` is `None`.
pub fn candidate_count(category: Category, split: Option<Split>) -> usize {
    let table = object_table();
    let quadrants: Vec<(usize, usize)> = match split {
        Some(s) => s.quadrants().to_vec(),
        None => Split::ALL.iter().flat_map(|s| s.quadrants().iter().copied()).collect(),
    };
    Space::new(category.seed_kind(), &quadrants, &table.objects, &table.colorings).total
}

fn rng_for(seed: u64, category: Category, split: Split) -> ChaCha8Rng {
    let salt = (category as u64 * 3 + split as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    ChaCha8Rng::seed_from_u64(seed ^ salt)
}

fn sample(space: &Space<'_>, n: usize, rng: &mut ChaCha8Rng) -> Result<BTreeSet<usize>, GenError> {
    if n > space.total {
        return Err(GenError::Infeasible(format!("{n} boards requested but only {} exist", space.total)));
    }
    // group flat ranges by object so each object is drawn at least once
    let mut groups: BTreeMap<(&str, String), Vec<usize>> = BTreeMap::new();
    for (i, b) in space.blocks.iter().enumerate() {
        groups.entry((b.object.seed_id.as_str(), b.object.combo_name.clone())).or_default().push(i);
    }
    let groups: Vec<Vec<usize>> = groups.into_values().collect();
    let picked_groups: Vec<usize> = if n >= groups.len() {
        (0..groups.len()).collect()
    } else {
        let mut g = index::sample(rng, groups.len(), n).into_vec();
        g.sort_unstable();
        g
    };
    let mut chosen = BTreeSet::new();
    for g in picked_groups {
        let sizes: Vec<usize> = groups[g].iter().map(|&b| space.blocks[b].size()).collect();
        let mut r = rng.random_range(0..sizes.iter().sum::<usize>());
        for (&b, &size) in groups[g].iter().zip(&sizes) {
            if r < size {
                chosen.insert(space.starts[b] + r);
                break;
            }
            r -= size;
        }
    }
    while chosen.len() < n {
        chosen.insert(rng.random_range(0..space.total));
    }
    Ok(chosen)
}

/// Samples train/val/test records for every category. Train boards sit in
/// the top-left quadrant, val in the top-right and test in either bottom
/// quadrant. Output order is fixed by the configuration alone.
pub fn make_splits(config: &SplitConfig) -> Result<SplitSet, GenError> {
    let table = object_table();
    let mut records = Vec::new();
    for category in Category::ALL {
        let counts = config.counts(category);
        for split in Split::ALL {
            let space = Space::new(category.seed_kind(), split.quadrants(), &table.objects, &table.colorings);
            let mut rng = rng_for(config.rng_seed, category, split);
            for flat in sample(&space, counts.get(split), &mut rng)? {
                records.push(space.record(flat)?);
            }
        }
    }
    Ok(SplitSet { records })
}

pub fn write_jsonl<W: Write>(records: &[BoardRecord], mut out: W) -> std::io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn read_jsonl<R: BufRead>(input: R) -> Result<Vec<BoardRecord>, serde_json::Error> {
    let mut out = Vec::new();
    for line in input.lines() {
        let line = line.map_err(serde_json::Error::io)?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SplitConfig {
        let c = SplitCounts { train: 20, val: 5, test: 5 };
        SplitConfig { rng_seed: 7, simple_simple: c, regular_simple: c, regular_complex: c }
    }

    #[test]
    fn small_config_counts_and_quadrants() {
        let set = make_splits(&small()).unwrap();
        for cat in Category::ALL {
            assert_eq!(set.count(cat, Split::Train), 20);
            assert_eq!(set.count(cat, Split::Val), 5);
        }
        for r in &set.records {
            assert!(r.target.occupied().all(|(row, col, _)| r.split.contains(row, col)), "{}", r.id);
        }
    }

    #[test]
    fn same_seed_same_bytes() {
        let write = |set: &SplitSet| {
            let mut buf = Vec::new();
            write_jsonl(&set.records, &mut buf).unwrap();
            buf
        };
        let a = write(&make_splits(&small()).unwrap());
        let b = write(&make_splits(&small()).unwrap());
        assert_eq!(a, b);
        let back = read_jsonl(a.as_slice()).unwrap();
        assert_eq!(back, make_splits(&small()).unwrap().records);
    }

    #[test]
    fn oversized_request_is_infeasible() {
        let mut cfg = small();
        cfg.regular_simple.val = 1_000_000;
        assert!(matches!(make_splits(&cfg), Err(GenError::Infeasible(_))));
    }
}

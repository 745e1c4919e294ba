//! Dense indexing of Sz(q) by canonical parameters.
//!
//! Ranks are a mixed-radix encoding of [`BruhatParams`]: Borel elements occupy
//! `0..q^2(q-1)` and the big cell follows, so the rank order equals the
//! parameter order and `rank`/`unrank` need no stored table. For q <= 8 the
//! index additionally keeps every matrix and a matrix-to-rank map, which is
//! what the walk and Cayley-graph code use to build generator actions.

use std::collections::HashMap;
use std::io::{Read, Write};

use super::{group_order, BruhatParams, Matrix4, Suzuki, SuzukiElement};
use crate::error::{Error, Result};
use crate::field::{Fe, Field};

pub const INDEX_MAGIC: &[u8; 8] = b"SZIDX\0v1";
const FULL_LIMIT_M: u32 = 3;
const INDEX_ONLY_LIMIT_M: u32 = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IndexMode {
    /// Matrices kept in memory.
    Full,
    /// Rank/unrank only.
    ParamsOnly,
}

pub struct GroupIndex {
    group: Suzuki,
    count: u64,
    mode: IndexMode,
    matrices: Vec<Matrix4>,
    lookup: HashMap<u64, u32>,
}

impl std::fmt::Debug for GroupIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GroupIndex")
            .field("q", &self.group.q())
            .field("count", &self.count)
            .field("mode", &self.mode)
            .finish()
    }
}

impl GroupIndex {
    /// Enumerates Sz(q). Full mode for q <= 8, parameter-only mode for q = 32.
    pub fn enumerate(field: &Field) -> Result<GroupIndex> {
        let m = field.degree();
        let mode = if m <= FULL_LIMIT_M {
            IndexMode::Full
        } else if m <= INDEX_ONLY_LIMIT_M {
            IndexMode::ParamsOnly
        } else {
            return Err(Error::Capacity {
                what: format!("enumerating Sz(2^{m})"),
                limit: 1 << INDEX_ONLY_LIMIT_M,
                hint: "enumeration supports q <= 32; use sampled mode for larger q",
            });
        };
        Self::build(Suzuki::new(field.clone()), mode)
    }

    pub fn enumerate_params_only(field: &Field) -> Result<GroupIndex> {
        if field.degree() > INDEX_ONLY_LIMIT_M {
            return Self::enumerate(field);
        }
        Self::build(Suzuki::new(field.clone()), IndexMode::ParamsOnly)
    }

    fn build(group: Suzuki, mode: IndexMode) -> Result<GroupIndex> {
        let count = group.order() as u64;
        let mut matrices = Vec::new();
        let mut lookup = HashMap::new();
        if mode == IndexMode::Full {
            matrices.reserve(count as usize);
            lookup.reserve(count as usize);
            let m = group.field().degree();
            for (i, e) in group.elements().enumerate() {
                let key = e.matrix().pack(m);
                if lookup.insert(key, i as u32).is_some() {
                    return Err(Error::Inconsistent(format!(
                        "parametrization collision at rank {i}"
                    )));
                }
                matrices.push(*e.matrix());
            }
            if matrices.len() as u64 != count {
                return Err(Error::Inconsistent(format!(
                    "enumerated {} elements, expected {count}",
                    matrices.len()
                )));
            }
        }
        Ok(GroupIndex {
            group,
            count,
            mode,
            matrices,
            lookup,
        })
    }

    pub fn group(&self) -> &Suzuki {
        &self.group
    }

    pub fn field(&self) -> &Field {
        self.group.field()
    }

    pub fn len(&self) -> usize {
        self.count as usize
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn mode(&self) -> IndexMode {
        self.mode
    }

    pub fn borel_len(&self) -> u64 {
        let q = self.group.q();
        q * q * (q - 1)
    }

    pub fn rank(&self, p: &BruhatParams) -> u64 {
        let q = self.group.q();
        let qm1 = q - 1;
        match *p {
            BruhatParams::Borel { alpha, beta, gamma } => {
                (alpha.0 as u64 * q + beta.0 as u64) * qm1 + (gamma.0 as u64 - 1)
            }
            BruhatParams::BigCell {
                alpha,
                beta,
                gamma,
                alpha2,
                beta2,
            } => {
                let head = (alpha.0 as u64 * q + beta.0 as u64) * qm1 + (gamma.0 as u64 - 1);
                self.borel_len() + (head * q + alpha2.0 as u64) * q + beta2.0 as u64
            }
        }
    }

    pub fn unrank(&self, r: u64) -> BruhatParams {
        let q = self.group.q();
        let qm1 = q - 1;
        let split = |head: u64| {
            let gamma = Fe((head % qm1 + 1) as u32);
            let rest = head / qm1;
            (Fe((rest / q) as u32), Fe((rest % q) as u32), gamma)
        };
        if r < self.borel_len() {
            let (alpha, beta, gamma) = split(r);
            BruhatParams::Borel { alpha, beta, gamma }
        } else {
            let r = r - self.borel_len();
            let beta2 = Fe((r % q) as u32);
            let alpha2 = Fe(((r / q) % q) as u32);
            let (alpha, beta, gamma) = split(r / (q * q));
            BruhatParams::BigCell {
                alpha,
                beta,
                gamma,
                alpha2,
                beta2,
            }
        }
    }

    pub fn element(&self, r: u64) -> SuzukiElement {
        self.group.assemble(self.unrank(r))
    }

    pub fn index_of(&self, g: &SuzukiElement) -> u32 {
        self.rank(g.params()) as u32
    }

    /// Matrix of rank `r` (full mode only).
    pub fn matrix(&self, r: usize) -> &Matrix4 {
        &self.matrices[r]
    }

    /// Rank of a matrix, if it is a group element (full mode only).
    pub fn index_of_matrix(&self, m: &Matrix4) -> Option<u32> {
        self.lookup.get(&m.pack(self.field().degree())).copied()
    }

    fn require_full(&self) -> Result<()> {
        if self.mode != IndexMode::Full {
            return Err(Error::Capacity {
                what: "generator action tables need in-memory matrices".into(),
                limit: 1 << FULL_LIMIT_M,
                hint: "action tables are available for q <= 8",
            });
        }
        Ok(())
    }

    /// Right-multiplication tables: `table[x][k]` is the rank of `x * s_k`
    /// for `s = (a, a^-1, b, b^-1)`.
    pub fn action_table(&self, a: &SuzukiElement, b: &SuzukiElement) -> Result<Vec<[u32; 4]>> {
        self.require_full()?;
        let f = self.field();
        let gens = [
            *a.matrix(),
            *self.group.inverse(a).matrix(),
            *b.matrix(),
            *self.group.inverse(b).matrix(),
        ];
        for g in &gens {
            if self.index_of_matrix(g).is_none() {
                return Err(Error::InvalidParameter(
                    "generator is not an element of the indexed group".into(),
                ));
            }
        }
        self.matrices
            .iter()
            .map(|x| {
                let mut row = [0u32; 4];
                for (k, s) in gens.iter().enumerate() {
                    row[k] = self.index_of_matrix(&x.mul(f, s)).ok_or_else(|| {
                        Error::Inconsistent("product fell outside the index".into())
                    })?;
                }
                Ok(row)
            })
            .collect()
    }

    /// Size of the subgroup generated by `a, b`, by breadth-first search over
    /// an action table.
    pub fn closure_size(table: &[[u32; 4]], start: u32) -> usize {
        let mut seen = vec![false; table.len()];
        let mut queue = std::collections::VecDeque::new();
        seen[start as usize] = true;
        queue.push_back(start);
        let mut count = 1;
        while let Some(x) = queue.pop_front() {
            for &y in &table[x as usize] {
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    count += 1;
                    queue.push_back(y);
                }
            }
        }
        count
    }

    pub fn identity_rank(&self) -> u32 {
        self.index_of(&self.group.identity_element())
    }

    /// Writes the binary cache: magic, m (u32), modulus (u64), element count
    /// (u64), then one record per element in rank order: tag byte
    /// (0 Borel, 1 big cell) and five little-endian u32 parameters.
    pub fn write_cache<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(INDEX_MAGIC)?;
        w.write_all(&self.field().degree().to_le_bytes())?;
        w.write_all(&self.field().modulus().to_le_bytes())?;
        w.write_all(&self.count.to_le_bytes())?;
        let mut buf = Vec::with_capacity(21 * 4096);
        for r in 0..self.count {
            encode_record(&self.unrank(r), &mut buf);
            if buf.len() >= 21 * 4096 {
                w.write_all(&buf)?;
                buf.clear();
            }
        }
        w.write_all(&buf)?;
        Ok(())
    }

    /// Loads and validates a cache written by [`GroupIndex::write_cache`].
    pub fn read_cache<R: Read>(mut r: R) -> Result<GroupIndex> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != INDEX_MAGIC {
            return Err(Error::Cache("bad magic header".into()));
        }
        let m = read_u32(&mut r)?;
        let modulus = read_u64(&mut r)?;
        let count = read_u64(&mut r)?;
        let field = Field::new(m).map_err(|e| Error::Cache(e.to_string()))?;
        if field.modulus() != modulus {
            return Err(Error::Cache(format!(
                "modulus {modulus:#b} differs from the canonical {:#b}",
                field.modulus()
            )));
        }
        let expected = group_order(field.order())?;
        if count as u128 != expected {
            return Err(Error::Cache(format!(
                "element count {count} does not match |Sz(q)| = {expected}"
            )));
        }
        let index = GroupIndex::enumerate(&field)?;
        let mut rec = [0u8; 21];
        for rank in 0..count {
            r.read_exact(&mut rec)
                .map_err(|_| Error::Cache(format!("truncated at record {rank}")))?;
            let p = decode_record(&rec)?;
            if p != index.unrank(rank) {
                return Err(Error::Cache(format!("record {rank} out of order")));
            }
        }
        let mut extra = [0u8; 1];
        if r.read(&mut extra)? != 0 {
            return Err(Error::Cache("trailing bytes after records".into()));
        }
        Ok(index)
    }
}

fn encode_record(p: &BruhatParams, out: &mut Vec<u8>) {
    let (tag, vals) = match *p {
        BruhatParams::Borel { alpha, beta, gamma } => {
            (0u8, [alpha, beta, gamma, Fe::ZERO, Fe::ZERO])
        }
        BruhatParams::BigCell {
            alpha,
            beta,
            gamma,
            alpha2,
            beta2,
        } => (1u8, [alpha, beta, gamma, alpha2, beta2]),
    };
    out.push(tag);
    for v in vals {
        out.extend_from_slice(&v.0.to_le_bytes());
    }
}

fn decode_record(rec: &[u8; 21]) -> Result<BruhatParams> {
    let v = |i: usize| {
        Fe(u32::from_le_bytes(
            rec[1 + 4 * i..5 + 4 * i].try_into().unwrap(),
        ))
    };
    match rec[0] {
        0 => BruhatParams::borel(v(0), v(1), v(2)),
        1 => BruhatParams::big_cell(v(0), v(1), v(2), v(3), v(4)),
        t => Err(Error::Cache(format!("bad record tag {t}"))),
    }
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

//! Uncoded placement and XOR multicast delivery.
//!
//! Each of the `N` files is split into `C(K, p)` equal subfiles, one per
//! `p`-subset of users, where `p = MK/N` must be an integer. User `k` caches
//! every subfile labeled by a subset containing `k`. After the demands
//! arrive, the server sends one XOR-combined payload per `(p+1)`-subset of
//! users; each user strips the cached terms and recovers exactly the
//! subfiles it misses.
//!
//! Subfiles occupy contiguous bit blocks of their file, with subsets laid
//! out in colexicographic order; that pins the bit-level content of every
//! payload, so the induced distribution of the delivered message is well
//! defined.

use num_integer::binomial;
use num_traits::Zero;
use std::collections::BTreeMap;

use crate::bits::{bits_to_index, index_to_bits, xor_bits};
use crate::prob::JointTable;
use crate::{Error, Result};

const MAX_ENUM_BITS: usize = 24;

/// All `k`-subsets of `{0, .., n-1}` in colexicographic order (compare from
/// the largest element down).
pub fn subsets_colex(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut all = Vec::new();
    let mut current = Vec::new();
    fn rec(start: usize, n: usize, k: usize, current: &mut Vec<usize>, all: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            all.push(current.clone());
            return;
        }
        for v in start..n {
            current.push(v);
            rec(v + 1, n, k, current, all);
            current.pop();
        }
    }
    rec(0, n, k, &mut current, &mut all);
    all.sort_by(|a, b| a.iter().rev().cmp(b.iter().rev()));
    all
}

/// Validated system parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CachingParams {
    files: usize,
    users: usize,
    file_bits: usize,
    cache_files: usize,
    p: usize,
    subfile_bits: usize,
    p_subsets: Vec<Vec<usize>>,
    delivery_subsets: Vec<Vec<usize>>,
    p_subset_index: BTreeMap<Vec<usize>, usize>,
    delivery_subset_index: BTreeMap<Vec<usize>, usize>,
}

/// Checks `N >= K >= 1`, `0 <= M <= N`, integrality of `p = MK/N`, and that
/// `C(K, p)` divides the file size. `M = 0` is the degenerate empty-cache
/// point with unicast delivery.
pub fn make_params(
    files: usize,
    users: usize,
    file_bits: usize,
    cache_files: usize,
) -> Result<CachingParams> {
    if users == 0 || files < users {
        return Err(Error::InvalidParameter(format!(
            "need N >= K >= 1, got N={files}, K={users}"
        )));
    }
    if file_bits == 0 {
        return Err(Error::InvalidParameter("file size must be positive".into()));
    }
    if cache_files > files {
        return Err(Error::InvalidParameter(format!(
            "cache of {cache_files} files exceeds the {files}-file database"
        )));
    }
    let mk = cache_files * users;
    if !mk.is_multiple_of(files) {
        return Err(Error::UnsupportedMemoryPoint { mk, n: files });
    }
    let p = mk / files;
    let parts = binomial(users, p);
    if !file_bits.is_multiple_of(parts) {
        return Err(Error::IndivisibleFile { file_bits, parts });
    }
    let p_subsets = subsets_colex(users, p);
    let delivery_subsets = subsets_colex(users, p + 1);
    let p_subset_index = p_subsets
        .iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), i))
        .collect();
    let delivery_subset_index = delivery_subsets
        .iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), i))
        .collect();
    Ok(CachingParams {
        files,
        users,
        file_bits,
        cache_files,
        p,
        subfile_bits: file_bits / parts,
        p_subsets,
        delivery_subsets,
        p_subset_index,
        delivery_subset_index,
    })
}

impl CachingParams {
    pub fn files(&self) -> usize {
        self.files
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn file_bits(&self) -> usize {
        self.file_bits
    }

    pub fn cache_files(&self) -> usize {
        self.cache_files
    }

    /// `p = MK/N`: how many users cache each subfile.
    pub fn cached_per_subfile(&self) -> usize {
        self.p
    }

    pub fn subfile_bits(&self) -> usize {
        self.subfile_bits
    }

    pub fn p_subsets(&self) -> &[Vec<usize>] {
        &self.p_subsets
    }

    pub fn delivery_subsets(&self) -> &[Vec<usize>] {
        &self.delivery_subsets
    }

    /// Total length of the delivered message in bits.
    pub fn message_bits(&self) -> usize {
        self.delivery_subsets.len() * self.subfile_bits
    }

    /// Number of bits describing one full database realization.
    pub fn database_bits(&self) -> usize {
        self.files * self.file_bits
    }

    fn subfile_position(&self, subset: &[usize]) -> Result<usize> {
        self.p_subset_index
            .get(subset)
            .copied()
            .ok_or_else(|| Error::InvalidParameter(format!("unknown subfile subset {subset:?}")))
    }
}

/// One concrete database: `N` files of `F` bits each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatabaseRealization {
    files: Vec<Vec<bool>>,
}

impl DatabaseRealization {
    pub fn new(params: &CachingParams, files: Vec<Vec<bool>>) -> Result<Self> {
        if files.len() != params.files || files.iter().any(|f| f.len() != params.file_bits) {
            return Err(Error::DimensionMismatch(
                "database does not match declared file count or size".into(),
            ));
        }
        Ok(Self { files })
    }

    /// Decodes a database from its integer index: file 0 occupies the most
    /// significant bits.
    pub fn from_index(params: &CachingParams, index: usize) -> Result<Self> {
        let total = params.database_bits();
        if total > MAX_ENUM_BITS {
            return Err(Error::SizeLimit(format!(
                "database of {total} bits is too large to enumerate"
            )));
        }
        let bits = index_to_bits(index, total);
        let files = bits
            .chunks(params.file_bits)
            .map(|c| c.to_vec())
            .collect();
        Self::new(params, files)
    }

    pub fn to_index(&self) -> usize {
        let bits: Vec<bool> = self.files.iter().flatten().copied().collect();
        bits_to_index(&bits)
    }

    pub fn file(&self, n: usize) -> &[bool] {
        &self.files[n]
    }

    /// The bits of subfile `(n, subset)` under the colexicographic layout.
    pub fn subfile(&self, params: &CachingParams, file: usize, subset: &[usize]) -> Result<Vec<bool>> {
        let pos = params.subfile_position(subset)?;
        let lo = pos * params.subfile_bits;
        Ok(self.files[file][lo..lo + params.subfile_bits].to_vec())
    }
}

/// Identifies one subfile: a file and the user subset that caches it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SubfileIndex {
    pub file: usize,
    pub subset: Vec<usize>,
}

/// Everything user `k` holds after placement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CacheContent {
    pub user: usize,
    pub subfiles: BTreeMap<SubfileIndex, Vec<bool>>,
}

impl CacheContent {
    pub fn total_bits(&self) -> usize {
        self.subfiles.values().map(Vec::len).sum()
    }
}

/// Fills every cache: user `k` receives subfile `(n, S)` for all `n` and all
/// `S` containing `k`. Meets the memory budget `M * F` bits with equality.
pub fn placement(params: &CachingParams, db: &DatabaseRealization) -> Result<Vec<CacheContent>> {
    let mut caches = Vec::with_capacity(params.users);
    for user in 0..params.users {
        let mut subfiles = BTreeMap::new();
        for file in 0..params.files {
            for subset in &params.p_subsets {
                if subset.contains(&user) {
                    subfiles.insert(
                        SubfileIndex {
                            file,
                            subset: subset.clone(),
                        },
                        db.subfile(params, file, subset)?,
                    );
                }
            }
        }
        caches.push(CacheContent { user, subfiles });
    }
    Ok(caches)
}

/// One demanded file per user, held 0-based.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct DemandVector {
    d: Vec<usize>,
}

impl DemandVector {
    pub fn new(params: &CachingParams, d: Vec<usize>) -> Result<Self> {
        if d.len() != params.users || d.iter().any(|&f| f >= params.files) {
            return Err(Error::InvalidParameter(format!(
                "demand vector {d:?} does not fit {} users over {} files",
                params.users, params.files
            )));
        }
        Ok(Self { d })
    }

    /// Parses the 1-based convention used in configs and reports.
    pub fn from_one_based(params: &CachingParams, d: &[usize]) -> Result<Self> {
        if d.contains(&0) {
            return Err(Error::InvalidParameter(
                "demand indices are 1-based and must be positive".into(),
            ));
        }
        Self::new(params, d.iter().map(|&f| f - 1).collect())
    }

    pub fn demanded(&self, user: usize) -> usize {
        self.d[user]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.d
    }

    /// `"(1,2)"`, 1-based, for reports.
    pub fn label(&self) -> String {
        let inner: Vec<String> = self.d.iter().map(|&f| (f + 1).to_string()).collect();
        format!("({})", inner.join(","))
    }
}

/// Every demand vector in `[N]^K`, in lexicographic order.
pub fn all_demands(params: &CachingParams) -> Vec<DemandVector> {
    let mut out = Vec::new();
    let mut current = vec![0usize; params.users];
    loop {
        out.push(DemandVector {
            d: current.clone(),
        });
        let mut pos = params.users;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            current[pos] += 1;
            if current[pos] < params.files {
                break;
            }
            current[pos] = 0;
            if pos == 0 {
                return out;
            }
        }
    }
}

/// The multicast message: one XOR payload per `(p+1)`-subset, in
/// colexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeliveryMessage {
    segments: Vec<(Vec<usize>, Vec<bool>)>,
}

impl DeliveryMessage {
    pub fn segments(&self) -> &[(Vec<usize>, Vec<bool>)] {
        &self.segments
    }

    pub fn to_bits(&self) -> Vec<bool> {
        self.segments
            .iter()
            .flat_map(|(_, payload)| payload.iter().copied())
            .collect()
    }

    pub fn to_index(&self) -> usize {
        bits_to_index(&self.to_bits())
    }

    /// Reassembles a message from its concatenated bits.
    pub fn from_bits(params: &CachingParams, bits: &[bool]) -> Result<Self> {
        if bits.len() != params.message_bits() {
            return Err(Error::DimensionMismatch(format!(
                "message of {} bits, expected {}",
                bits.len(),
                params.message_bits()
            )));
        }
        let segments = params
            .delivery_subsets
            .iter()
            .zip(bits.chunks(params.subfile_bits.max(1)))
            .map(|(subset, chunk)| (subset.clone(), chunk.to_vec()))
            .collect();
        Ok(Self { segments })
    }
}

/// Builds the delivery message for a demand vector: the payload for subset
/// `g` is the XOR over `j` in `g` of subfile `(d_j, g \ {j})`.
pub fn delivery(
    params: &CachingParams,
    db: &DatabaseRealization,
    demand: &DemandVector,
) -> Result<DeliveryMessage> {
    let mut segments = Vec::with_capacity(params.delivery_subsets.len());
    for gamma in &params.delivery_subsets {
        let mut payload = vec![false; params.subfile_bits];
        for &j in gamma {
            let rest: Vec<usize> = gamma.iter().copied().filter(|&u| u != j).collect();
            let sub = db.subfile(params, demand.demanded(j), &rest)?;
            payload = xor_bits(&payload, &sub)?;
        }
        segments.push((gamma.clone(), payload));
    }
    Ok(DeliveryMessage { segments })
}

/// Reconstructs file `d_k` for user `k` from its cache and the message.
/// Subfiles labeled with `k` come from the cache; each other subfile comes
/// from the payload of its subset joined with `k`, XORed with the cached
/// subfiles of the other participating users' demands.
pub fn user_decode(
    params: &CachingParams,
    user: usize,
    cache: &CacheContent,
    msg: &DeliveryMessage,
    demand: &DemandVector,
) -> Result<Vec<bool>> {
    if cache.user != user {
        return Err(Error::DecodeFailure(format!(
            "cache belongs to user {}, not {user}",
            cache.user
        )));
    }
    if msg.segments.len() != params.delivery_subsets.len() {
        return Err(Error::DecodeFailure(
            "message has the wrong number of segments".into(),
        ));
    }
    let wanted = demand.demanded(user);
    let lookup = |file: usize, subset: &[usize]| -> Result<Vec<bool>> {
        cache
            .subfiles
            .get(&SubfileIndex {
                file,
                subset: subset.to_vec(),
            })
            .cloned()
            .ok_or_else(|| {
                Error::DecodeFailure(format!("subfile ({file}, {subset:?}) missing from cache"))
            })
    };
    let mut file = vec![false; params.file_bits];
    for (pos, omega) in params.p_subsets.iter().enumerate() {
        let piece = if omega.contains(&user) {
            lookup(wanted, omega)?
        } else {
            let mut gamma: Vec<usize> = omega.clone();
            gamma.push(user);
            gamma.sort_unstable();
            let seg = *params
                .delivery_subset_index
                .get(&gamma)
                .ok_or_else(|| Error::DecodeFailure(format!("no segment for subset {gamma:?}")))?;
            let mut acc = msg.segments[seg].1.clone();
            if acc.len() != params.subfile_bits {
                return Err(Error::DecodeFailure("payload length mismatch".into()));
            }
            for &j in &gamma {
                if j == user {
                    continue;
                }
                let rest: Vec<usize> = gamma.iter().copied().filter(|&u| u != j).collect();
                acc = xor_bits(&acc, &lookup(demand.demanded(j), &rest)?)?;
            }
            acc
        };
        let lo = pos * params.subfile_bits;
        file[lo..lo + params.subfile_bits].copy_from_slice(&piece);
    }
    Ok(file)
}

/// Pushes a joint over `(X, database index)` through the delivery map of one
/// demand vector, producing the exact joint of `(X, message index)`. The
/// message alphabet is the full `2^(message bits)` range; unreachable values
/// keep zero mass.
pub fn induced_joint(
    joint_xy: &JointTable,
    params: &CachingParams,
    demand: &DemandVector,
) -> Result<JointTable> {
    let db_bits = params.database_bits();
    if joint_xy.cols() != 1usize << db_bits {
        return Err(Error::DimensionMismatch(format!(
            "joint has {} database columns, expected 2^{db_bits}",
            joint_xy.cols()
        )));
    }
    let msg_bits = params.message_bits();
    if msg_bits > MAX_ENUM_BITS {
        return Err(Error::SizeLimit(format!(
            "message alphabet of 2^{msg_bits} values is too large"
        )));
    }
    // precompute the deterministic delivery map on the database alphabet
    let mut map = Vec::with_capacity(joint_xy.cols());
    for y in 0..joint_xy.cols() {
        let reachable = (0..joint_xy.rows()).any(|x| !joint_xy.mass_at(x, y).is_zero());
        if reachable {
            let db = DatabaseRealization::from_index(params, y)?;
            map.push(Some(delivery(params, &db, demand)?.to_index()));
        } else {
            map.push(None);
        }
    }
    joint_xy.push_forward(1usize << msg_bits, |y| map[y])
}

/// Exact mass check of a cache against the `M * F` budget.
pub fn memory_budget_bits(params: &CachingParams) -> usize {
    params.cache_files * params.file_bits
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    /// Two users, two 2-bit files; the private attribute is the pair of
    /// first bits. File distributions: (1/16, 7/16, 7/16, 1/16) over the
    /// first file's bit pairs and (1/10, 2/5, 2/5, 1/10) over the second's.
    pub(crate) fn two_user_joint(params: &CachingParams) -> JointTable {
        let p1 = [
            ratio(1, 16),
            ratio(7, 16),
            ratio(7, 16),
            ratio(1, 16),
        ];
        let p2 = [ratio(1, 10), ratio(2, 5), ratio(2, 5), ratio(1, 10)];
        let mut entries = Vec::new();
        for y1 in 0..4usize {
            for y2 in 0..4usize {
                let y = (y1 << 2) | y2;
                let x = ((y1 >> 1) << 1) | (y2 >> 1);
                entries.push((x, y, &p1[y1] * &p2[y2]));
            }
        }
        JointTable::from_entries(4, 1 << params.database_bits(), &entries).unwrap()
    }

    fn two_user_params() -> CachingParams {
        make_params(2, 2, 2, 1).unwrap()
    }

    #[test]
    fn params_accept_the_two_user_point() {
        let p = two_user_params();
        assert_eq!(p.cached_per_subfile(), 1);
        assert_eq!(p.subfile_bits(), 1);
        assert_eq!(p.message_bits(), 1);
    }

    #[test]
    fn params_accept_full_caching() {
        let p = make_params(2, 2, 2, 2).unwrap();
        assert_eq!(p.cached_per_subfile(), 2);
        assert_eq!(p.subfile_bits(), 2);
        // C(2, 3) = 0 delivery subsets: empty message
        assert_eq!(p.message_bits(), 0);
    }

    #[test]
    fn params_reject_fractional_memory_points() {
        assert!(matches!(
            make_params(3, 2, 2, 1),
            Err(Error::UnsupportedMemoryPoint { mk: 2, n: 3 })
        ));
        assert!(matches!(
            make_params(2, 2, 3, 1),
            Err(Error::IndivisibleFile { file_bits: 3, parts: 2 })
        ));
    }

    #[test]
    fn empty_cache_point_is_supported() {
        let p = make_params(1, 1, 2, 0).unwrap();
        assert_eq!(p.cached_per_subfile(), 0);
        let db = DatabaseRealization::from_index(&p, 0b10).unwrap();
        let caches = placement(&p, &db).unwrap();
        assert_eq!(caches[0].total_bits(), 0);
        // unicast delivery carries the whole file
        let d = DemandVector::new(&p, vec![0]).unwrap();
        let msg = delivery(&p, &db, &d).unwrap();
        assert_eq!(msg.to_bits(), vec![true, false]);
        let got = user_decode(&p, 0, &caches[0], &msg, &d).unwrap();
        assert_eq!(got, vec![true, false]);
    }

    #[test]
    fn placement_splits_first_and_second_bits() {
        let p = two_user_params();
        // files: Y1 = 10, Y2 = 01
        let db = DatabaseRealization::new(&p, vec![vec![true, false], vec![false, true]]).unwrap();
        let caches = placement(&p, &db).unwrap();
        // user 0 caches the first bit of each file, user 1 the second
        assert_eq!(
            caches[0].subfiles[&SubfileIndex { file: 0, subset: vec![0] }],
            vec![true]
        );
        assert_eq!(
            caches[0].subfiles[&SubfileIndex { file: 1, subset: vec![0] }],
            vec![false]
        );
        assert_eq!(
            caches[1].subfiles[&SubfileIndex { file: 0, subset: vec![1] }],
            vec![false]
        );
        assert_eq!(
            caches[1].subfiles[&SubfileIndex { file: 1, subset: vec![1] }],
            vec![true]
        );
        for c in &caches {
            assert_eq!(c.total_bits(), memory_budget_bits(&p));
        }
    }

    #[test]
    fn full_caching_stores_everything() {
        let p = make_params(2, 2, 2, 2).unwrap();
        let db = DatabaseRealization::from_index(&p, 0b0110).unwrap();
        let caches = placement(&p, &db).unwrap();
        for c in &caches {
            assert_eq!(c.total_bits(), memory_budget_bits(&p));
            assert_eq!(c.subfiles.len(), 2);
        }
    }

    #[test]
    fn delivery_xors_the_crossed_subfiles() {
        let p = two_user_params();
        let db = DatabaseRealization::new(&p, vec![vec![true, false], vec![false, true]]).unwrap();
        // distinct demands: payload = Y1[2] xor Y2[1]
        let d = DemandVector::from_one_based(&p, &[1, 2]).unwrap();
        let msg = delivery(&p, &db, &d).unwrap();
        assert_eq!(msg.to_bits(), vec![false ^ false]);

        // both demand file 1: payload = Y1[2] xor Y1[1]
        let d = DemandVector::from_one_based(&p, &[1, 1]).unwrap();
        assert_eq!(delivery(&p, &db, &d).unwrap().to_bits(), vec![false ^ true]);

        // swapped demands: payload = Y2[2] xor Y1[1]
        let d = DemandVector::from_one_based(&p, &[2, 1]).unwrap();
        assert_eq!(delivery(&p, &db, &d).unwrap().to_bits(), vec![true ^ true]);
    }

    #[test]
    fn users_decode_with_one_cached_and_one_recovered_bit() {
        let p = two_user_params();
        let db = DatabaseRealization::new(&p, vec![vec![true, false], vec![false, true]]).unwrap();
        let caches = placement(&p, &db).unwrap();
        let d = DemandVector::from_one_based(&p, &[1, 2]).unwrap();
        let msg = delivery(&p, &db, &d).unwrap();
        assert_eq!(
            user_decode(&p, 0, &caches[0], &msg, &d).unwrap(),
            db.file(0)
        );
        assert_eq!(
            user_decode(&p, 1, &caches[1], &msg, &d).unwrap(),
            db.file(1)
        );
    }

    #[test]
    fn full_caching_decodes_from_cache_alone() {
        let p = make_params(2, 2, 2, 2).unwrap();
        for y in 0..16 {
            let db = DatabaseRealization::from_index(&p, y).unwrap();
            let caches = placement(&p, &db).unwrap();
            for d in all_demands(&p) {
                let msg = delivery(&p, &db, &d).unwrap();
                assert!(msg.to_bits().is_empty());
                for k in 0..2 {
                    assert_eq!(
                        user_decode(&p, k, &caches[k], &msg, &d).unwrap(),
                        db.file(d.demanded(k))
                    );
                }
            }
        }
    }

    #[test]
    fn decoding_is_lossless_over_all_realizations_and_demands() {
        let p = two_user_params();
        for y in 0..16 {
            let db = DatabaseRealization::from_index(&p, y).unwrap();
            let caches = placement(&p, &db).unwrap();
            for d in all_demands(&p) {
                let msg = delivery(&p, &db, &d).unwrap();
                for k in 0..2 {
                    assert_eq!(
                        user_decode(&p, k, &caches[k], &msg, &d).unwrap(),
                        db.file(d.demanded(k)),
                        "realization {y}, demand {}, user {k}",
                        d.label()
                    );
                }
            }
        }
    }

    #[test]
    fn decode_rejects_inconsistent_inputs() {
        let p = two_user_params();
        let db = DatabaseRealization::from_index(&p, 5).unwrap();
        let caches = placement(&p, &db).unwrap();
        let d = DemandVector::from_one_based(&p, &[1, 2]).unwrap();
        let msg = delivery(&p, &db, &d).unwrap();
        // wrong user's cache
        assert!(user_decode(&p, 0, &caches[1], &msg, &d).is_err());
    }

    #[test]
    fn message_length_matches_the_rate_formula() {
        for (n, k, f, m) in [(2, 2, 2, 1), (4, 2, 2, 2), (3, 3, 6, 1), (3, 3, 3, 2)] {
            let p = make_params(n, k, f, m).unwrap();
            let expected = (k as f64) * (1.0 - m as f64 / n as f64)
                / (1.0 + (k * m) as f64 / n as f64)
                * f as f64;
            assert!(
                (p.message_bits() as f64 - expected).abs() < 1e-9,
                "rate mismatch at N={n} K={k} F={f} M={m}"
            );
        }
    }

    #[test]
    fn induced_joint_matches_the_displayed_kernel() {
        let p = two_user_params();
        let joint = two_user_joint(&p);
        let d = DemandVector::from_one_based(&p, &[1, 2]).unwrap();
        let induced = induced_joint(&joint, &p, &d).unwrap();
        assert_eq!(induced.rows(), 4);
        assert_eq!(induced.cols(), 2);
        assert_eq!(induced.row_marginal(), joint.row_marginal());
        let (kernel, kept) = induced.conditional_of_positive_rows().unwrap();
        assert_eq!(kept, vec![0, 1, 2, 3]);
        let col = |x: usize| kernel.column(x).to_ratios();
        // X = (first bit of Y1, first bit of Y2); message = Y1[2] xor Y2[1]
        assert_eq!(col(0), vec![ratio(1, 8), ratio(7, 8)]);
        assert_eq!(col(1), vec![ratio(7, 8), ratio(1, 8)]);
        assert_eq!(col(2), vec![ratio(7, 8), ratio(1, 8)]);
        assert_eq!(col(3), vec![ratio(1, 8), ratio(7, 8)]);
    }

    #[test]
    fn induced_joint_information_matches_the_binary_entropy_values() {
        let p = two_user_params();
        let joint = two_user_joint(&p);
        let d = DemandVector::from_one_based(&p, &[1, 2]).unwrap();
        let induced = induced_joint(&joint, &p, &d).unwrap();
        let h18 = dist_entropy(&[ratio(7, 8), ratio(1, 8)]);
        // every column of the kernel is a (7/8, 1/8) pair
        assert!((induced.conditional_entropy_bits() - h18).abs() < 1e-12);
        assert!((induced.mutual_information_bits() - (1.0 - h18)).abs() < 1e-12);
    }

    fn dist_entropy(masses: &[crate::rational::Ratio]) -> f64 {
        crate::prob::FiniteDistribution::new(masses.to_vec())
            .unwrap()
            .entropy_bits()
    }

    #[test]
    fn induced_joint_for_repeated_second_demand_has_one_fifth_pattern() {
        let p = two_user_params();
        let joint = two_user_joint(&p);
        let d = DemandVector::from_one_based(&p, &[2, 2]).unwrap();
        let induced = induced_joint(&joint, &p, &d).unwrap();
        let (kernel, _) = induced.conditional_of_positive_rows().unwrap();
        for x in 0..4 {
            assert_eq!(
                kernel.column(x).to_ratios(),
                vec![ratio(1, 5), ratio(4, 5)]
            );
        }
        let q = crate::coupling::greedy_qstar(&kernel).unwrap();
        assert!((q.entropy_bits() - 0.7219).abs() < 1e-3);
    }

    #[test]
    fn database_independent_of_x_induces_a_product_joint() {
        let p = two_user_params();
        // X uniform on 2 symbols, independent of a uniform database
        let uniform = ratio(1, 2 * 16);
        let mut entries = Vec::new();
        for x in 0..2usize {
            for y in 0..16usize {
                entries.push((x, y, uniform.clone()));
            }
        }
        let joint = JointTable::from_entries(2, 16, &entries).unwrap();
        let d = DemandVector::from_one_based(&p, &[1, 2]).unwrap();
        let induced = induced_joint(&joint, &p, &d).unwrap();
        assert!(induced.is_product());
        assert!(induced.mutual_information_bits().abs() < 1e-12);
    }

    #[test]
    fn colex_order_is_stable() {
        assert_eq!(subsets_colex(2, 1), vec![vec![0], vec![1]]);
        assert_eq!(
            subsets_colex(4, 2),
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![1, 2],
                vec![0, 3],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        assert_eq!(subsets_colex(3, 0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn demand_enumeration_covers_the_grid() {
        let p = two_user_params();
        let demands = all_demands(&p);
        assert_eq!(demands.len(), 4);
        let labels: Vec<String> = demands.iter().map(DemandVector::label).collect();
        assert_eq!(labels, vec!["(1,1)", "(1,2)", "(2,1)", "(2,2)"]);
    }

    #[test]
    fn demand_validation_is_one_based() {
        let p = two_user_params();
        assert!(DemandVector::from_one_based(&p, &[0, 1]).is_err());
        assert!(DemandVector::from_one_based(&p, &[1, 3]).is_err());
        assert_eq!(
            DemandVector::from_one_based(&p, &[2, 1]).unwrap().as_slice(),
            &[1, 0]
        );
    }
}

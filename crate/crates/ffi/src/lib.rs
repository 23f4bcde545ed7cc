//! C ABI for `kposet`.
//!
//! Posets, splitting certificates and simplifying chains are opaque handles
//! owned by the caller and released with their `_free` function. Every
//! fallible call returns a [`KpStatus`]; on failure the message is available
//! from [`kp_last_error`] on the same thread until the next failing call.
//! Strings returned through `char **` out-parameters are released with
//! [`kp_string_free`].

use std::cell::RefCell;
use std::collections::BTreeSet;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use kposet::analysis::{d_value, e_count};
use kposet::io;
use kposet::oracle::{gen_proper, GenParams};
use kposet::{
    check_k, classify_single_max, glue_as, is_isomorphic, simplify, split_at, verify_splitting, AnalysisError, CardTag,
    NodeId, SimplifyingChain, SkeletonPoset, SplittingCertificate, TransformError,
};

/// A skeleton poset.
pub struct KpPoset(SkeletonPoset);

/// A splitting certificate together with its upper and lower posets.
pub struct KpCertificate(SplittingCertificate);

/// A simplifying chain.
pub struct KpChain(SimplifyingChain);

#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum KpStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    /// Malformed document or invalid poset.
    Parse = 3,
    /// The input does not meet an analysis precondition.
    Analysis = 4,
    /// A construction could not be carried out.
    Transform = 5,
    /// A certificate failed verification.
    Verification = 6,
    InvalidArgument = 7,
    OutOfRange = 8,
    Panic = 99,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(KpStatus, String);

impl Failure {
    fn new(status: KpStatus, msg: impl ToString) -> Self {
        Failure(status, msg.to_string())
    }
}

impl From<kposet::DocumentError> for Failure {
    fn from(e: kposet::DocumentError) -> Self {
        Failure::new(KpStatus::Parse, e)
    }
}

impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Self {
        Failure::new(KpStatus::Analysis, e)
    }
}

impl From<TransformError> for Failure {
    fn from(e: TransformError) -> Self {
        match e {
            TransformError::Unverified(_) => Failure::new(KpStatus::Verification, e),
            TransformError::Analysis(_) => Failure::new(KpStatus::Analysis, e),
            e => Failure::new(KpStatus::Transform, e),
        }
    }
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> KpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => KpStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            KpStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure::new(KpStatus::NullArgument, format!("{what} is null")))
}

unsafe fn text<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(Failure::new(KpStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| Failure::new(KpStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::new(KpStatus::NullArgument, "output pointer is null"));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|e| Failure::new(KpStatus::InvalidArgument, e))?;
    put(out, c.into_raw())
}

unsafe fn put_box<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::new(KpStatus::NullArgument, "output pointer is null"));
    }
    out.write(Box::into_raw(Box::new(value)));
    Ok(())
}

/// Message of the last failing call on this thread, or null. Valid until
/// the next failing call on this thread.
#[no_mangle]
pub extern "C" fn kp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` is null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn kp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a poset document.
///
/// # Safety
/// `json` is a nul-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn kp_poset_parse(json: *const c_char, out: *mut *mut KpPoset) -> KpStatus {
    guard(|| {
        let p = io::parse(text(json, "json")?)?;
        put_box(out, KpPoset(p))
    })
}

/// # Safety
/// `p` is null or a poset handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn kp_poset_free(p: *mut KpPoset) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Canonical document text.
///
/// # Safety
/// `p` is a live poset handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn kp_poset_serialize(p: *const KpPoset, out: *mut *mut c_char) -> KpStatus {
    guard(|| put_string(out, io::serialize(&borrow(p, "poset")?.0)))
}

/// # Safety
/// `p` is a live poset handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn kp_poset_export_dot(p: *const KpPoset, out: *mut *mut c_char) -> KpStatus {
    guard(|| put_string(out, io::export_dot(&borrow(p, "poset")?.0)))
}

/// Number of explicit nodes.
///
/// # Safety
/// `p` is a live poset handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn kp_poset_node_count(p: *const KpPoset, out: *mut usize) -> KpStatus {
    guard(|| put(out, borrow(p, "poset")?.0.len()))
}

/// Decides the K-poset axioms and properness.
///
/// # Safety
/// `p` is a live poset handle; `is_k` and `is_proper` are writable.
#[no_mangle]
pub unsafe extern "C" fn kp_poset_check(p: *const KpPoset, is_k: *mut bool, is_proper: *mut bool) -> KpStatus {
    guard(|| {
        let report = check_k(&borrow(p, "poset")?.0)?;
        put(is_k, report.is_k)?;
        put(is_proper, report.is_proper)
    })
}

/// Classification of a proper single-max K-poset, e.g. `tent k=2 card=aleph0`.
///
/// # Safety
/// `p` is a live poset handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn kp_poset_classify(p: *const KpPoset, out: *mut *mut c_char) -> KpStatus {
    guard(|| put_string(out, classify_single_max(&borrow(p, "poset")?.0)?.to_string()))
}

/// `d` of a proper single-max K-poset.
///
/// # Safety
/// `p` is a live poset handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn kp_poset_d_value(p: *const KpPoset, out: *mut usize) -> KpStatus {
    guard(|| put(out, d_value(&borrow(p, "poset")?.0)?))
}

/// Number of non-simple maximal nodes of a proper K-poset.
///
/// # Safety
/// `p` is a live poset handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn kp_poset_e_count(p: *const KpPoset, out: *mut usize) -> KpStatus {
    guard(|| put(out, e_count(&borrow(p, "poset")?.0)?))
}

/// # Safety
/// `p` and `q` are live poset handles; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn kp_poset_is_isomorphic(p: *const KpPoset, q: *const KpPoset, out: *mut bool) -> KpStatus {
    guard(|| put(out, is_isomorphic(&borrow(p, "poset")?.0, &borrow(q, "poset")?.0)))
}

/// Seeded random proper K-poset. `card` is `finite:<n>`, `aleph0` or `beta`.
///
/// # Safety
/// `card` is a nul-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn kp_poset_generate(
    n_min: usize,
    n_max2: usize,
    n_h: usize,
    card: *const c_char,
    seed: u64,
    out: *mut *mut KpPoset,
) -> KpStatus {
    guard(|| {
        let card: CardTag = text(card, "card")?
            .parse()
            .map_err(|e| Failure::new(KpStatus::InvalidArgument, e))?;
        let params = GenParams {
            n_min,
            n_max2,
            n_h,
            card,
            seed,
        };
        let p = gen_proper(&params).map_err(|e| Failure::new(KpStatus::InvalidArgument, e))?;
        put_box(out, KpPoset(p))
    })
}

/// Splits a proper single-max K-poset at its maximal node `node`.
///
/// # Safety
/// `p` is a live poset handle; `node` is a nul-terminated string; `out` is
/// writable.
#[no_mangle]
pub unsafe extern "C" fn kp_split_at(p: *const KpPoset, node: *const c_char, out: *mut *mut KpCertificate) -> KpStatus {
    guard(|| {
        let cert = split_at(&borrow(p, "poset")?.0, &NodeId::from(text(node, "node")?))?;
        put_box(out, KpCertificate(cert))
    })
}

/// Glues the comma-separated maximal nodes in `fiber`. The quotient is the
/// lower poset of the returned certificate. `name` may be null.
///
/// # Safety
/// `p` is a live poset handle; `fiber` is a nul-terminated string; `name` is
/// null or a nul-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn kp_glue(
    p: *const KpPoset,
    fiber: *const c_char,
    name: *const c_char,
    out: *mut *mut KpCertificate,
) -> KpStatus {
    guard(|| {
        let fiber: BTreeSet<NodeId> = text(fiber, "fiber")?
            .split(',')
            .filter(|s| !s.is_empty())
            .map(NodeId::from)
            .collect();
        let name = if name.is_null() {
            None
        } else {
            Some(NodeId::from(text(name, "name")?))
        };
        let (_, cert) = glue_as(&borrow(p, "poset")?.0, &fiber, name.as_ref())?;
        put_box(out, KpCertificate(cert))
    })
}

/// Reads a certificate document and attaches copies of `upper` and `lower`.
///
/// # Safety
/// `json` is a nul-terminated string; `upper` and `lower` are live poset
/// handles; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn kp_certificate_parse(
    json: *const c_char,
    upper: *const KpPoset,
    lower: *const KpPoset,
    out: *mut *mut KpCertificate,
) -> KpStatus {
    guard(|| {
        let (u, v) = (borrow(upper, "upper")?.0.clone(), borrow(lower, "lower")?.0.clone());
        let cert = io::parse_certificate(text(json, "json")?, u, v)?;
        put_box(out, KpCertificate(cert))
    })
}

/// # Safety
/// `c` is null or a certificate handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn kp_certificate_free(c: *mut KpCertificate) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// # Safety
/// `c` is a live certificate handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn kp_certificate_serialize(c: *const KpCertificate, out: *mut *mut c_char) -> KpStatus {
    guard(|| put_string(out, io::serialize_certificate(&borrow(c, "certificate")?.0)))
}

/// Copy of the upper poset.
///
/// # Safety
/// `c` is a live certificate handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn kp_certificate_upper(c: *const KpCertificate, out: *mut *mut KpPoset) -> KpStatus {
    guard(|| put_box(out, KpPoset(borrow(c, "certificate")?.0.upper().clone())))
}

/// Copy of the lower poset.
///
/// # Safety
/// `c` is a live certificate handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn kp_certificate_lower(c: *const KpCertificate, out: *mut *mut KpPoset) -> KpStatus {
    guard(|| put_box(out, KpPoset(borrow(c, "certificate")?.0.lower().clone())))
}

/// Returns `KP_STATUS_VERIFICATION` with the first violation as the error
/// message when the certificate does not describe a splitting.
///
/// # Safety
/// `c` is a live certificate handle.
#[no_mangle]
pub unsafe extern "C" fn kp_certificate_verify(c: *const KpCertificate) -> KpStatus {
    guard(|| match verify_splitting(&borrow(c, "certificate")?.0).first() {
        None => Ok(()),
        Some(v) => Err(Failure::new(KpStatus::Verification, v)),
    })
}

/// Full simplifying chain of a proper K-poset.
///
/// # Safety
/// `p` is a live poset handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn kp_simplify(p: *const KpPoset, out: *mut *mut KpChain) -> KpStatus {
    guard(|| put_box(out, KpChain(simplify(&borrow(p, "poset")?.0)?)))
}

/// # Safety
/// `c` is null or a chain handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn kp_chain_free(c: *mut KpChain) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Number of splittings in the chain.
///
/// # Safety
/// `c` is a live chain handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn kp_chain_len(c: *const KpChain, out: *mut usize) -> KpStatus {
    guard(|| put(out, borrow(c, "chain")?.0.len()))
}

fn stage_index(chain: &SimplifyingChain, i: usize) -> Result<usize, Failure> {
    let n = chain.len();
    if i > n {
        return Err(Failure::new(
            KpStatus::OutOfRange,
            format!("stage {i} of a chain of length {n}"),
        ));
    }
    Ok(n - i)
}

/// Copy of stage `i`: stage 0 is the input, stage `i` results from `i`
/// splittings.
///
/// # Safety
/// `c` is a live chain handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn kp_chain_stage(c: *const KpChain, i: usize, out: *mut *mut KpPoset) -> KpStatus {
    guard(|| {
        let chain = &borrow(c, "chain")?.0;
        put_box(out, KpPoset(chain.stages[stage_index(chain, i)?].poset.clone()))
    })
}

/// Copy of the certificate splitting stage `i` onto stage `i - 1`, for
/// `1 <= i <= len`.
///
/// # Safety
/// `c` is a live chain handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn kp_chain_certificate(c: *const KpChain, i: usize, out: *mut *mut KpCertificate) -> KpStatus {
    guard(|| {
        let chain = &borrow(c, "chain")?.0;
        let cert = match chain.stages[stage_index(chain, i)?].cert.clone() {
            Some(cert) if i > 0 => cert,
            _ => return Err(Failure::new(KpStatus::OutOfRange, "stage 0 has no certificate")),
        };
        put_box(out, KpCertificate(cert))
    })
}

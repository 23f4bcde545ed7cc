#ifndef KPOSET_H
#define KPOSET_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  KP_STATUS_OK = 0,
  KP_STATUS_NULL_ARGUMENT = 1,
  KP_STATUS_INVALID_UTF8 = 2,
  /**
   * Malformed document or invalid poset.
   */
  KP_STATUS_PARSE = 3,
  /**
   * The input does not meet an analysis precondition.
   */
  KP_STATUS_ANALYSIS = 4,
  /**
   * A construction could not be carried out.
   */
  KP_STATUS_TRANSFORM = 5,
  /**
   * A certificate failed verification.
   */
  KP_STATUS_VERIFICATION = 6,
  KP_STATUS_INVALID_ARGUMENT = 7,
  KP_STATUS_OUT_OF_RANGE = 8,
  KP_STATUS_PANIC = 99,
} KpStatus;

/**
 * A splitting certificate together with its upper and lower posets.
 */
typedef struct KpCertificate KpCertificate;

/**
 * A simplifying chain.
 */
typedef struct KpChain KpChain;

/**
 * A skeleton poset.
 */
typedef struct KpPoset KpPoset;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failing call on this thread, or null. Valid until
 * the next failing call on this thread.
 */
const char *kp_last_error(void);

/**
 * # Safety
 * `s` is null or a string returned by this library and not yet freed.
 */
void kp_string_free(char *s);

/**
 * Parses a poset document.
 *
 * # Safety
 * `json` is a nul-terminated string; `out` is writable.
 */
KpStatus kp_poset_parse(const char *json, KpPoset **out);

/**
 * # Safety
 * `p` is null or a poset handle not yet freed.
 */
void kp_poset_free(KpPoset *p);

/**
 * Canonical document text.
 *
 * # Safety
 * `p` is a live poset handle; `out` is writable.
 */
KpStatus kp_poset_serialize(const KpPoset *p, char **out);

/**
 * # Safety
 * `p` is a live poset handle; `out` is writable.
 */
KpStatus kp_poset_export_dot(const KpPoset *p, char **out);

/**
 * Number of explicit nodes.
 *
 * # Safety
 * `p` is a live poset handle; `out` is writable.
 */
KpStatus kp_poset_node_count(const KpPoset *p, size_t *out);

/**
 * Decides the K-poset axioms and properness.
 *
 * # Safety
 * `p` is a live poset handle; `is_k` and `is_proper` are writable.
 */
KpStatus kp_poset_check(const KpPoset *p, bool *is_k, bool *is_proper);

/**
 * Classification of a proper single-max K-poset, e.g. `tent k=2 card=aleph0`.
 *
 * # Safety
 * `p` is a live poset handle; `out` is writable.
 */
KpStatus kp_poset_classify(const KpPoset *p, char **out);

/**
 * `d` of a proper single-max K-poset.
 *
 * # Safety
 * `p` is a live poset handle; `out` is writable.
 */
KpStatus kp_poset_d_value(const KpPoset *p, size_t *out);

/**
 * Number of non-simple maximal nodes of a proper K-poset.
 *
 * # Safety
 * `p` is a live poset handle; `out` is writable.
 */
KpStatus kp_poset_e_count(const KpPoset *p, size_t *out);

/**
 * # Safety
 * `p` and `q` are live poset handles; `out` is writable.
 */
KpStatus kp_poset_is_isomorphic(const KpPoset *p, const KpPoset *q, bool *out);

/**
 * Seeded random proper K-poset. `card` is `finite:<n>`, `aleph0` or `beta`.
 *
 * # Safety
 * `card` is a nul-terminated string; `out` is writable.
 */
KpStatus kp_poset_generate(size_t n_min,
                           size_t n_max2,
                           size_t n_h,
                           const char *card,
                           uint64_t seed,
                           KpPoset **out);

/**
 * Splits a proper single-max K-poset at its maximal node `node`.
 *
 * # Safety
 * `p` is a live poset handle; `node` is a nul-terminated string; `out` is
 * writable.
 */
KpStatus kp_split_at(const KpPoset *p, const char *node, KpCertificate **out);

/**
 * Glues the comma-separated maximal nodes in `fiber`. The quotient is the
 * lower poset of the returned certificate. `name` may be null.
 *
 * # Safety
 * `p` is a live poset handle; `fiber` is a nul-terminated string; `name` is
 * null or a nul-terminated string; `out` is writable.
 */
KpStatus kp_glue(const KpPoset *p, const char *fiber, const char *name, KpCertificate **out);

/**
 * Reads a certificate document and attaches copies of `upper` and `lower`.
 *
 * # Safety
 * `json` is a nul-terminated string; `upper` and `lower` are live poset
 * handles; `out` is writable.
 */
KpStatus kp_certificate_parse(const char *json,
                              const KpPoset *upper,
                              const KpPoset *lower,
                              KpCertificate **out);

/**
 * # Safety
 * `c` is null or a certificate handle not yet freed.
 */
void kp_certificate_free(KpCertificate *c);

/**
 * # Safety
 * `c` is a live certificate handle; `out` is writable.
 */
KpStatus kp_certificate_serialize(const KpCertificate *c, char **out);

/**
 * Copy of the upper poset.
 *
 * # Safety
 * `c` is a live certificate handle; `out` is writable.
 */
KpStatus kp_certificate_upper(const KpCertificate *c, KpPoset **out);

/**
 * Copy of the lower poset.
 *
 * # Safety
 * `c` is a live certificate handle; `out` is writable.
 */
KpStatus kp_certificate_lower(const KpCertificate *c, KpPoset **out);

/**
 * Returns `KP_STATUS_VERIFICATION` with the first violation as the error
 * message when the certificate does not describe a splitting.
 *
 * # Safety
 * `c` is a live certificate handle.
 */
KpStatus kp_certificate_verify(const KpCertificate *c);

/**
 * Full simplifying chain of a proper K-poset.
 *
 * # Safety
 * `p` is a live poset handle; `out` is writable.
 */
KpStatus kp_simplify(const KpPoset *p, KpChain **out);

/**
 * # Safety
 * `c` is null or a chain handle not yet freed.
 */
void kp_chain_free(KpChain *c);

/**
 * Number of splittings in the chain.
 *
 * # Safety
 * `c` is a live chain handle; `out` is writable.
 */
KpStatus kp_chain_len(const KpChain *c, size_t *out);

/**
 * Copy of stage `i`: stage 0 is the input, stage `i` results from `i`
 * splittings.
 *
 * # Safety
 * `c` is a live chain handle; `out` is writable.
 */
KpStatus kp_chain_stage(const KpChain *c, size_t i, KpPoset **out);

/**
 * Copy of the certificate splitting stage `i` onto stage `i - 1`, for
 * `1 <= i <= len`.
 *
 * # Safety
 * `c` is a live chain handle; `out` is writable.
 */
KpStatus kp_chain_certificate(const KpChain *c, size_t i, KpCertificate **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KPOSET_H */

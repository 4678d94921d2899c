//! Dimensions of minimal-class spaces in genus one (and the genus-zero
//! statement).
//!
//! The weight-k graded piece of the k-th cohomology of the open genus-1
//! moduli space with n markings is S[k+1] tensored with an induced
//! representation of dimension C(n,k): two copies of the weight-(k+1)
//! cusp-form space (holomorphic plus antiholomorphic) times the binomial
//! count, vanishing for n < k. Poincaré duality pairs this piece
//! perfectly with the minimal classes in complementary degree 2n - k, so
//! dim H^j_min = dim Gr^W_{2n-j} H^{2n-j}. The k = 0 piece is the
//! constants and is special-cased to dimension 1, which makes the point
//! class the only even-degree minimal class.
//!
//! The level-1 cusp form dimension is classical: 0 for odd weight or
//! weight below 12; for even k >= 12 it is floor(k/12) - 1 when
//! k ≡ 2 (mod 12) and floor(k/12) otherwise.

/// Dimension of the space of weight-k cusp forms for the full modular
/// group.
pub fn dim_cusp_forms(k: usize) -> usize {
    if k % 2 == 1 || k < 12 {
        return 0;
    }
    if k % 12 == 2 {
        k / 12 - 1
    } else {
        k / 12
    }
}

/// Binomial coefficient with exact integer arithmetic.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut out: u64 = 1;
    for i in 0..k {
        out = out * (n - i) as u64 / (i + 1) as u64;
    }
    out
}

/// Dimension of the weight-k graded piece of H^k of the open genus-1
/// space with n markings. Zero when n < k; 1 at k = 0 (constants);
/// 2 · dim S_{k+1} · C(n,k) otherwise.
pub fn dim_grw_k(n: usize, k: usize) -> u64 {
    assert!(n >= 1, "genus 1 needs at least one marking");
    if k == 0 {
        return 1;
    }
    if n < k {
        return 0;
    }
    2 * dim_cusp_forms(k + 1) as u64 * binomial(n, k)
}

/// Dimension of the degree-j minimal classes on the compact genus-1
/// space with n markings, via the perfect pairing with the weight-graded
/// piece in complementary degree (the space has complex dimension n).
pub fn dim_minimal(n: usize, j: usize) -> u64 {
    assert!(n >= 1, "genus 1 needs at least one marking");
    assert!(j <= 2 * n, "degree exceeds the real dimension");
    dim_grw_k(n, 2 * n - j)
}

/// In genus zero the point class is the only minimal class: dimension 1
/// exactly in degree 2(n-3).
pub fn genus0_minimal_check(n: usize, j: usize) -> u64 {
    assert!(n >= 3, "genus 0 needs at least three markings");
    if j == 2 * (n - 3) {
        1
    } else {
        0
    }
}

/// CSV table of minimal-class dimensions: rows n, j, dim_minimal.
pub fn dims_csv(n_max: usize) -> String {
    let mut out = String::from("n,j,dim_minimal\n");
    for n in 1..=n_max {
        for j in 0..=2 * n {
            out.push_str(&format!("{n},{j},{}\n", dim_minimal(n, j)));
        }
    }
    out
}

/// CSV table of the weight-graded pieces: rows n, k, dim_grw.
pub fn grw_csv(n_max: usize) -> String {
    let mut out = String::from("n,k,dim_grw\n");
    for n in 1..=n_max {
        for k in 0..=n {
            out.push_str(&format!("{n},{k},{}\n", dim_grw_k(n, k)));
        }
    }
    out
}

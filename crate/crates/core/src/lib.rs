//! Pure states of N K-level subsystems ("quKits"): the symmetric subspace,
//! generalized coherent states, and a product-state decision procedure.
//!
//! Inside the symmetric subspace the only product states are the coherent
//! states, and every state orthogonal to it is entangled; the [`verify`]
//! module checks both statements on random samples.
//!
//! ```
//! use num_complex::Complex64;
//! use qukit::{classify_symmetric, coherent_coefficients, coherent_product, is_product, CoherentParams, Verdict};
//!
//! let params = CoherentParams::new(5, 3, vec![Complex64::new(0.4, 0.1), Complex64::new(-1.2, 0.0)])?;
//!
//! let psi = coherent_product(&params)?;
//! assert_eq!(is_product(&psi, 1e-10)?.verdict, Verdict::Product);
//!
//! let sym = coherent_coefficients(&params)?;
//! assert!(classify_symmetric(&sym, 1e-10)?.is_coherent());
//! # Ok::<(), qukit::Error>(())
//! ```

pub mod bench;
pub mod coherent;
pub mod entanglement;
pub mod error;
pub mod io;
pub mod operators;
pub mod random;
pub mod symmetric;
pub mod tensor;
pub mod verify;

pub use coherent::{
    coherent_coefficients, coherent_displace, coherent_displace_compressed, coherent_product, tau_from_displacement,
    CoherentParams, DisplacementParams,
};
pub use entanglement::{
    brute_force_is_product, classify_symmetric, is_product, symmetric_witness, Classification, SymClassification,
    SymVerdict, Verdict, Witness, DEFAULT_TOL,
};
pub use error::{Error, Result};
pub use operators::{cartan, collective_apply, collective_dense, ladder, SiteOperator};
pub use symmetric::{
    dicke_normalized, dicke_unnormalized, dicke_via_ladders, enumerate_occupations, expand, project_symmetric,
    recursion_split, Occupation, SymStateCompressed, SymmetricBasis,
};
pub use tensor::{
    basis_index, inner_product, make_product_state, normalize, site_decompose, ProductFactors, SiteDecomposition,
    StateVector,
};

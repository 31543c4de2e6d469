//! Numerical toolkit for bell-shaped functions.
//!
//! A function f on the real line is bell-shaped when it is nonnegative,
//! vanishes at both infinities, and its n-th derivative changes sign exactly
//! n times for every n. Such functions are exactly the convolutions of a
//! Polya frequency function with an "AM-CM" density (absolutely monotone on
//! the negative half-line, completely monotone on the positive one), and they
//! admit a canonical Fourier-domain representation driven by a level-crossing
//! density phi.
//!
//! The crate provides:
//! - [`phi`]: the piecewise-affine level-crossing representation and its
//!   admissibility checks;
//! - [`transform`]: the canonical Fourier transform built from phi;
//! - [`factor`]: the canonical factorisation into Polya frequency and AM-CM
//!   parts;
//! - [`pff`] and [`amcm`]: the two factor families themselves;
//! - [`exact`]: exact-arithmetic derivative engines for model densities and
//!   certified sign-change counts;
//! - [`zeromeasure`]: weighted derivative-zero measures and their limits;
//! - [`post`]: Post-style Laplace inversion through high-order derivatives;
//! - [`whale`]: truncated ("whale-shaped") convolutions of exponentials.
//!
//! Supporting numerics live in [`poly`] (exact polynomial arithmetic),
//! [`roots`] (certified root isolation) and [`quad`] (adaptive quadrature).

pub mod amcm;
pub mod exact;
pub mod factor;
pub mod pff;
pub mod phi;
pub mod post;
pub mod poly;
pub mod quad;
pub mod roots;
pub mod transform;
pub mod whale;
pub mod zeromeasure;

pub mod model;
pub mod ode;
pub mod phaseplane;
pub mod critical;
pub mod explicit;
pub mod selfmap;
pub mod pde;
pub mod suite;

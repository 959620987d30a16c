#pragma once

#include <string>

#include "djtled/kinematics.hpp"

namespace djtled {

enum class MaterialModel { NeoHookean, TransverseIsotropic, Orthotropic, MooneyRivlin };

inline const char* to_string(MaterialModel m) {
    switch (m) {
        case MaterialModel::NeoHookean: return "NH";
        case MaterialModel::TransverseIsotropic: return "TI";
        case MaterialModel::Orthotropic: return "OT";
        case MaterialModel::MooneyRivlin: return "MR";
    }
    return "?";
}

// Hyperelastic material description. Only the parameters of the tagged model
// are meaningful; the factory functions validate them.
template <class Real>
struct Material {
    MaterialModel model = MaterialModel::NeoHookean;
    Real mu = 0;       // shear modulus [Pa] (NH/TI/OT)
    Real kappa = 0;    // bulk modulus [Pa]
    Real eta_a = 0;    // fibre stiffness, family a [Pa]
    Real eta_b = 0;    // fibre stiffness, family b [Pa]
    Real c10 = 0;      // Mooney-Rivlin coefficients [Pa]
    Real c01 = 0;
    Real rho = 0;      // mass density [kg/m^3]
    Vec3<Real> fibre_a{};
    Vec3<Real> fibre_b{};

    static Material neo_hookean(Real mu, Real kappa, Real rho) {
        Material m;
        m.model = MaterialModel::NeoHookean;
        m.mu = mu; m.kappa = kappa; m.rho = rho;
        m.validate();
        return m;
    }

    static Material transverse_isotropic(Real mu, Real eta_a, Real kappa, Real rho, Vec3<Real> a) {
        Material m;
        m.model = MaterialModel::TransverseIsotropic;
        m.mu = mu; m.eta_a = eta_a; m.kappa = kappa; m.rho = rho; m.fibre_a = a;
        m.validate();
        return m;
    }

    static Material orthotropic(Real mu, Real eta_a, Real eta_b, Real kappa, Real rho,
                                Vec3<Real> a, Vec3<Real> b) {
        Material m;
        m.model = MaterialModel::Orthotropic;
        m.mu = mu; m.eta_a = eta_a; m.eta_b = eta_b; m.kappa = kappa; m.rho = rho;
        m.fibre_a = a; m.fibre_b = b;
        m.validate();
        return m;
    }

    static Material mooney_rivlin(Real c10, Real c01, Real kappa, Real rho) {
        Material m;
        m.model = MaterialModel::MooneyRivlin;
        m.c10 = c10; m.c01 = c01; m.kappa = kappa; m.rho = rho;
        m.validate();
        return m;
    }

    void validate() const {
        if (!(kappa > Real(0))) throw ConfigError("bulk modulus must be positive");
        if (!(rho > Real(0))) throw ConfigError("density must be positive");
        switch (model) {
            case MaterialModel::MooneyRivlin:
                if (c10 < Real(0) || c01 < Real(0)) throw ConfigError("Mooney-Rivlin coefficients must be >= 0");
                if (!(c10 + c01 > Real(0))) throw ConfigError("Mooney-Rivlin coefficients must not both vanish");
                break;
            case MaterialModel::Orthotropic:
                if (eta_b < Real(0)) throw ConfigError("fibre stiffness eta_b must be >= 0");
                if (!(norm(fibre_b) > Real(0))) throw ConfigError("fibre direction b must be nonzero");
                [[fallthrough]];
            case MaterialModel::TransverseIsotropic:
                if (eta_a < Real(0)) throw ConfigError("fibre stiffness eta_a must be >= 0");
                if (!(norm(fibre_a) > Real(0))) throw ConfigError("fibre direction a must be nonzero");
                [[fallthrough]];
            case MaterialModel::NeoHookean:
                if (!(mu > Real(0))) throw ConfigError("shear modulus must be positive");
                break;
        }
    }

    // Invariant dependencies used to size the precomputed constants.
    InvariantSet needs() const {
        InvariantSet s;
        s.i1 = true;
        if (model == MaterialModel::MooneyRivlin) s.i2 = true;
        if (model == MaterialModel::TransverseIsotropic || model == MaterialModel::Orthotropic) s.i4 = true;
        if (model == MaterialModel::Orthotropic) s.i6 = true;
        return s;
    }

    FibreDirections<Real> fibres() const {
        if (model == MaterialModel::Orthotropic) return FibreDirections<Real>::from(fibre_a, &fibre_b);
        if (model == MaterialModel::TransverseIsotropic) return FibreDirections<Real>::from(fibre_a);
        throw ConfigError("material has no fibre directions");
    }

    // Effective small-strain shear modulus; the Mooney-Rivlin pair maps to
    // mu = 2 (c10 + c01).
    Real shear_modulus() const {
        return model == MaterialModel::MooneyRivlin ? 2 * (c10 + c01) : mu;
    }
};

// Dilatational (P-)wave speed sqrt((kappa + 4 mu / 3) / rho) used for the
// explicit stability bound.
template <class Real>
inline Real dilatational_wave_speed(const Material<Real>& m) {
    return std::sqrt((m.kappa + Real(4) / Real(3) * m.shear_modulus()) / m.rho);
}

// Derivatives of the strain energy with respect to the modified invariants
// and the volume ratio. Entries a model does not depend on are structural
// zeros; the force kernel skips those terms entirely via the invariant set.
template <class Real>
struct EnergyDerivatives {
    Real dI1 = 0, dI2 = 0, dI4 = 0, dI5 = 0, dI6 = 0, dI7 = 0;
    Real dJ = 0;
};

// Strain energy density [Pa].
template <class Real>
inline Real energy(const Material<Real>& m, const InvariantRecord<Real>& inv) {
    const Real vol = m.kappa / 2 * (inv.J - 1) * (inv.J - 1);
    switch (m.model) {
        case MaterialModel::NeoHookean:
            return m.mu / 2 * (inv.Ib1 - 3) + vol;
        case MaterialModel::TransverseIsotropic:
            return m.mu / 2 * (inv.Ib1 - 3) + m.eta_a / 2 * (inv.Ib4 - 1) * (inv.Ib4 - 1) + vol;
        case MaterialModel::Orthotropic:
            return m.mu / 2 * (inv.Ib1 - 3) + m.eta_a / 2 * (inv.Ib4 - 1) * (inv.Ib4 - 1) +
                   m.eta_b / 2 * (inv.Ib6 - 1) * (inv.Ib6 - 1) + vol;
        case MaterialModel::MooneyRivlin:
            return m.c10 * (inv.Ib1 - 3) + m.c01 * (inv.Ib2 - 3) + vol;
    }
    return 0;
}

template <class Real>
inline EnergyDerivatives<Real> energy_derivatives(const Material<Real>& m,
                                                  const InvariantRecord<Real>& inv) {
    EnergyDerivatives<Real> d;
    d.dJ = m.kappa * (inv.J - 1);
    switch (m.model) {
        case MaterialModel::NeoHookean:
            d.dI1 = m.mu / 2;
            break;
        case MaterialModel::TransverseIsotropic:
            d.dI1 = m.mu / 2;
            d.dI4 = m.eta_a * (inv.Ib4 - 1);
            break;
        case MaterialModel::Orthotropic:
            d.dI1 = m.mu / 2;
            d.dI4 = m.eta_a * (inv.Ib4 - 1);
            d.dI6 = m.eta_b * (inv.Ib6 - 1);
            break;
        case MaterialModel::MooneyRivlin:
            d.dI1 = m.c10;
            d.dI2 = m.c01;
            break;
    }
    return d;
}

} // namespace djtled

#include "bess/inverter.hpp"

#include "bess/errors.hpp"

namespace bess {

InverterLossModel InverterLossModel::linear(double p_nominal_kw, double fixed_fraction,
                                            double charge_slope, double discharge_slope) {
  const double fixed = fixed_fraction * p_nominal_kw;
  return InverterLossModel{
      PwlTable::build({{0.0, fixed}, {p_nominal_kw, fixed + charge_slope * p_nominal_kw}}),
      PwlTable::build({{0.0, fixed}, {p_nominal_kw, fixed + discharge_slope * p_nominal_kw}}),
  };
}

double InverterLossModel::loss_kw(double p_kw, Mode mode) const {
  if (p_kw <= 0.0) return 0.0;
  return table(mode).eval(p_kw);
}

void InverterLossModel::validate() const {
  for (const PwlTable* t : {&charge, &discharge}) {
    if (t->x_min() != 0.0) throw DomainError("inverter loss table must start at 0 kW");
    if (!t->is_convex()) throw DomainError("inverter loss table must be convex");
    for (const auto& bp : t->breakpoints())
      if (bp.y < 0.0) throw DomainError("inverter loss must be non-negative");
  }
}

}  // namespace bess

#include "lyapsip/field.h"

#include <sstream>
#include <utility>

namespace lyapsip {

VectorField::VectorField(int dim, Evaluator eval, std::string label)
    : dim_(dim), eval_(std::move(eval)), label_(std::move(label)) {
  if (dim_ < 1) throw std::invalid_argument("VectorField: dim must be >= 1");
  if (!eval_) throw std::invalid_argument("VectorField: empty evaluator");
}

Vector VectorField::Eval(const Vector& y) const {
  if (y.size() != dim_) {
    std::ostringstream msg;
    msg << "VectorField '" << label_ << "': point has dimension " << y.size()
        << ", expected " << dim_;
    throw std::invalid_argument(msg.str());
  }
  Vector out = eval_(y);
  if (out.size() != dim_) {
    std::ostringstream msg;
    msg << "VectorField '" << label_ << "': evaluator returned dimension "
        << out.size() << ", expected " << dim_;
    throw std::runtime_error(msg.str());
  }
  return out;
}

ShiftedField::ShiftedField(VectorField base, Vector equilibrium)
    : base_(std::move(base)),
      equilibrium_(std::move(equilibrium)),
      shifted_(base_.dim(),
               [b = base_, eq = equilibrium_](const Vector& z) {
                 return b.Eval(z + eq);
               },
               base_.label()) {}

ShiftedField ShiftToEquilibrium(const VectorField& field, const Vector& eq,
                                double tolerance) {
  if (eq.size() != field.dim()) {
    throw std::invalid_argument("equilibrium has dimension " +
                                std::to_string(eq.size()) + ", field has " +
                                std::to_string(field.dim()));
  }
  const double residual = field.Eval(eq).norm();
  if (!(residual <= tolerance)) {
    std::ostringstream msg;
    msg << "point is not an equilibrium of '" << field.label()
        << "': |f(eq)| = " << residual << " > " << tolerance;
    throw NotAnEquilibrium(msg.str(), residual);
  }
  return ShiftedField(field, eq);
}

}  // namespace lyapsip

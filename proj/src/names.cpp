#include <stdexcept>
#include <string>

#include "slr/penalty.hpp"
#include "slr/solver.hpp"

namespace slr {

std::string_view to_string(PenaltyKind kind) {
  switch (kind) {
    case PenaltyKind::L1: return "l1";
    case PenaltyKind::SCAD: return "scad";
    case PenaltyKind::MCP: return "mcp";
    case PenaltyKind::CappedL1: return "capped_l1";
  }
  return "?";
}

PenaltyKind parse_penalty_kind(std::string_view name) {
  if (name == "l1") return PenaltyKind::L1;
  if (name == "scad") return PenaltyKind::SCAD;
  if (name == "mcp") return PenaltyKind::MCP;
  if (name == "capped_l1") return PenaltyKind::CappedL1;
  throw std::invalid_argument("unknown penalty '" + std::string(name) + "'");
}

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::IstaBB: return "ista_bb";
    case Variant::IstaReverse: return "ista_reverse";
    case Variant::FistaLipschitz: return "fista_lip";
    case Variant::IstaVanilla: return "ista_vanilla";
    case Variant::FistaVanilla: return "fista_vanilla";
  }
  return "?";
}

Variant parse_variant(std::string_view name) {
  if (name == "ista_bb") return Variant::IstaBB;
  if (name == "ista_reverse") return Variant::IstaReverse;
  if (name == "fista_lip") return Variant::FistaLipschitz;
  if (name == "ista_vanilla") return Variant::IstaVanilla;
  if (name == "fista_vanilla") return Variant::FistaVanilla;
  throw std::invalid_argument("unknown variant '" + std::string(name) + "'");
}

std::string_view to_string(Criterion c) {
  switch (c) {
    case Criterion::Auto: return "auto";
    case Criterion::Convex: return "convex";
    case Criterion::SufficientDecrease: return "sufficient_decrease";
  }
  return "?";
}

Criterion parse_criterion(std::string_view name) {
  if (name == "auto") return Criterion::Auto;
  if (name == "convex") return Criterion::Convex;
  if (name == "sufficient_decrease") return Criterion::SufficientDecrease;
  throw std::invalid_argument("unknown line-search criterion '" + std::string(name) + "'");
}

std::string_view to_string(InitKind k) {
  switch (k) {
    case InitKind::Zeros: return "zeros";
    case InitKind::Random: return "random";
    case InitKind::Given: return "given";
  }
  return "?";
}

InitKind parse_init_kind(std::string_view name) {
  if (name == "zeros") return InitKind::Zeros;
  if (name == "random") return InitKind::Random;
  if (name == "given") return InitKind::Given;
  throw std::invalid_argument("unknown initialization '" + std::string(name) + "'");
}

}  // namespace slr

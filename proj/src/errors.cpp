#include "iroplan/errors.hpp"

namespace iroplan {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DuplicateName: return "DuplicateName";
    case ErrorCode::OverlappingObjects: return "OverlappingObjects";
    case ErrorCode::InvalidScene: return "InvalidScene";
    case ErrorCode::PhysicallyBlocked: return "PhysicallyBlocked";
    case ErrorCode::NotGraspable: return "NotGraspable";
    case ErrorCode::UnknownLandmark: return "UnknownLandmark";
    case ErrorCode::InvalidScript: return "InvalidScript";
    case ErrorCode::UnboundConstant: return "UnboundConstant";
    case ErrorCode::UnknownVariable: return "UnknownVariable";
    case ErrorCode::UnknownType: return "UnknownType";
    case ErrorCode::UnknownCondition: return "UnknownCondition";
    case ErrorCode::EffectContradiction: return "EffectContradiction";
    case ErrorCode::NameClash: return "NameClash";
    case ErrorCode::UnknownAction: return "UnknownAction";
    case ErrorCode::InvalidModel: return "InvalidModel";
    case ErrorCode::UndeclaredConstant: return "UndeclaredConstant";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnsupportedFeature: return "UnsupportedFeature";
    case ErrorCode::ExecutionFailed: return "ExecutionFailed";
    case ErrorCode::UnknownResource: return "UnknownResource";
    case ErrorCode::VersionConflict: return "VersionConflict";
    case ErrorCode::BadRequest: return "BadRequest";
  }
  return "Unknown";
}

}  // namespace iroplan

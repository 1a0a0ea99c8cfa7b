#pragma once

#include <nlohmann/json.hpp>

#include "gtt/protocol/types.hpp"

namespace gtt {

/// Version of the trial JSON layout written by to_json(TrialRecord).
inline constexpr int kTrialSchemaVersion = 1;

void to_json(nlohmann::json& j, const ProtocolVariant& v);
void from_json(const nlohmann::json& j, ProtocolVariant& v);
void to_json(nlohmann::json& j, const TrialConfig& c);
void from_json(const nlohmann::json& j, TrialConfig& c);
void to_json(nlohmann::json& j, const Message& m);
void from_json(const nlohmann::json& j, Message& m);
void to_json(nlohmann::json& j, const ChatTurn& t);
void from_json(const nlohmann::json& j, ChatTurn& t);
void to_json(nlohmann::json& j, const ParsedAnswer& p);
void from_json(const nlohmann::json& j, ParsedAnswer& p);
void to_json(nlohmann::json& j, const RouteInfo& r);
void from_json(const nlohmann::json& j, RouteInfo& r);
void to_json(nlohmann::json& j, const FailureInfo& f);
void from_json(const nlohmann::json& j, FailureInfo& f);
void to_json(nlohmann::json& j, const TurnCounts& t);
void from_json(const nlohmann::json& j, TurnCounts& t);

/// Throws DomainError when schema_version is missing or unsupported.
void to_json(nlohmann::json& j, const TrialRecord& r);
void from_json(const nlohmann::json& j, TrialRecord& r);

}  // namespace gtt

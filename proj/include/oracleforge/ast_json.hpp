#pragma once

#include "oracleforge/candidates.hpp"
#include "oracleforge/oracles.hpp"
#include "oracleforge/testlang.hpp"

#include "json.hpp"

namespace oracleforge {

nlohmann::json to_json(const testlang::Expr& e);
nlohmann::json to_json(const testlang::Statement& s);
nlohmann::json to_json(const testlang::TestMethod& t);
nlohmann::json to_json(const testlang::UnitContext& c);
nlohmann::json to_json(const oracles::AssertionForm& f);
nlohmann::json to_json(const oracles::Oracle& o);
nlohmann::json to_json(const candidates::RetVal& r);

} // namespace oracleforge

// JSON (de)serialization of machines. Nonuniform documents carry
// kind/n/num_states/initial/accept/reject/optional shuffle/transitions with
// one table per square; uniform documents omit "n" and use a single table
// over symbols "0","1","<",">". States and squares are 1-based on the wire;
// probabilities are decimal strings with 17 significant digits.
#pragma once

#include <string>
#include <variant>

#include "machine.hpp"

namespace twa {

using AnyMachine = std::variant<NonuniformMachine, UniformTwoWayMachine>;

std::string machine_to_json(const NonuniformMachine& m, bool pretty = false);
std::string machine_to_json(const UniformTwoWayMachine& m, bool pretty = false);
std::string machine_to_json(const AnyMachine& m, bool pretty = false);

// Parses either document form (keyed on the presence of "n").
// Throws std::invalid_argument with a description on malformed input.
AnyMachine machine_from_json(const std::string& text);

AnyMachine load_machine_file(const std::string& path);
void save_machine_file(const std::string& path, const AnyMachine& m);

}  // namespace twa

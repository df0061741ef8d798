#pragma once

#include <string>

#include "dirlat/certificate.hpp"
#include "dirlat/guessing.hpp"
#include "dirlat/instance.hpp"
#include "dirlat/lp.hpp"
#include "dirlat/timegraph.hpp"

namespace dirlat {

// Instance schema: {"m", "s", "target" (int or null), "epsilon" ("p/q"), "cost" (rows)}.
// Parsing throws std::invalid_argument with the offending field named.
Instance instance_from_json(const std::string& text);
std::string instance_to_json(const Instance& instance);
Instance read_instance_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

// {"objective", "x": [[v,t,val]], "z_support": [[u,t,v,t',val]], "cuts_added"}.
// Root copies are reported under their host vertex; waits are left out of z_support.
std::string solution_to_json(const LpSolution& solution, const TimeNetwork& network);

// {"thresholds", "a_tour", "roots": {"i": host}}.
std::string triple_to_json(const GuessTriple& triple);

std::string certificate_to_json(const Certificate& certificate);

}  // namespace dirlat

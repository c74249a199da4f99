#pragma once

#include <string>

#include "ggc/composition.hpp"
#include "ggc/dectree.hpp"
#include "ggc/markov.hpp"
#include "ggc/qwalk.hpp"
#include "ggc/reflection.hpp"

// vendored single-header nlohmann/json
#include "json.hpp"

namespace ggc {

using Json = nlohmann::json;

// Shared schema: complex numbers as [re, im], matrices as row-major nested
// arrays, distributions and net-flows as label -> value maps.

Json complex_to_json(const Complex& c);
Complex complex_from_json(const Json& j);
Json cvector_to_json(const CVector& v);
CVector cvector_from_json(const Json& j);
Json cmatrix_to_json(const CMatrix& m);
CMatrix cmatrix_from_json(const Json& j);
Json rvector_to_json(const RVector& v);
RVector rvector_from_json(const Json& j);

Json graph_to_json(const WeightedGraph& g);
WeightedGraph graph_from_json(const Json& j);
Json chain_to_json(const MarkovChain& m);
MarkovChain chain_from_json(const Json& j);

/// {"a": 1.0, "b": -1.0} against a graph's vertex labels.
RVector labeled_values_from_json(const Json& j,
                                 const std::vector<std::string>& labels,
                                 bool require_distribution);

Json reflection_to_json(const StateReflectionProblem& r);
StateReflectionProblem reflection_from_json(const Json& j);
Json witnesses_to_json(const WitnessFamily& w);
WitnessFamily witnesses_from_json(const Json& j);
Json hyperedge_problem_to_json(const HyperedgeProblem& h);
HyperedgeProblem hyperedge_problem_from_json(const Json& j);

Json instance_to_json(const HypergraphInstance& inst);
/// Instances may embed problems/witnesses directly or reference a catalog
/// generator: {"generator": {"name": "dense_learning", "n": 3}}.
HypergraphInstance instance_from_json(const Json& j);

Json tree_to_json(const DecisionTree& t);
DecisionTree tree_from_json(const Json& j);

Json qwalk_to_json(const QWalkInstance& q);
/// Sizes-tier schema; {"synthesize": {"seed": n}} regenerates the concrete
/// payload tier deterministically.
QWalkInstance qwalk_from_json(const Json& j);

Json load_json_file(const std::string& path);

}  // namespace ggc

#pragma once

// Dataset plumbing: label/feature/Laplacian file formats, degree features,
// deterministic train/val/test splits for node classification, and the
// connectivity-preserving link prediction split with its three labeling
// schemes.

#include <cstdint>
#include <string>
#include <vector>

#include "magnet/autodiff.hpp"
#include "magnet/graph.hpp"
#include "magnet/spectral.hpp"

namespace magnet {

// "vertex<TAB>cluster" per line, '#' comments. Every vertex must appear
// exactly once.
std::vector<int> read_labels_file(const std::string& path, int num_vertices);
void write_labels_file(const std::string& path, const std::vector<int>& labels);

// "vertex<TAB>f0<TAB>f1..." per line; all rows must share one width.
RealMatrix read_features_file(const std::string& path, int num_vertices);
void write_features_file(const std::string& path, const RealMatrix& features);

// Triplet export with a "N q normalization" header; values at 17 significant
// digits so a write/read round trip is bit-stable.
void write_laplacian_file(const std::string& path, const MagneticLaplacian& l);
MagneticLaplacian read_laplacian_file(const std::string& path);

// N x 2 matrix of (in-degree, out-degree), typically on the residual graph.
RealMatrix degree_features(const DirectedGraph& g);

struct NodeSplit {
    std::vector<int> train, val, test;  // disjoint vertex sets, ascending
    std::string scheme;
    std::uint64_t seed = 0;
};

// Exactly train_per_class training vertices from every class, val_total
// validation vertices from the remainder, rest test.
NodeSplit node_split_per_class(const std::vector<int>& labels,
                               int train_per_class, int val_total,
                               std::uint64_t seed);

// Random split by fractions; the rounding remainder goes to train.
NodeSplit node_split_fraction(int num_vertices, double train_frac,
                              double val_frac, std::uint64_t seed);

void write_node_split_file(const std::string& path, const NodeSplit& s);
NodeSplit read_node_split_file(const std::string& path);

enum class LinkTask { existence, direction, three_class };

std::string to_string(LinkTask t);
LinkTask link_task_from_string(const std::string& s);

// Labeled ordered pairs for one evaluation set.
struct LinkObservations {
    std::vector<Edge> pairs;
    std::vector<int> labels;
};

struct LinkSplit {
    int num_vertices = 0;
    DirectedGraph residual;            // retained edges; operator graph
    std::vector<Edge> protected_edges; // spanning-forest cover, never removed
    LinkObservations train, val, test;
    LinkTask task = LinkTask::existence;
    bool include_noisy = false;
    std::uint64_t seed = 0;
};

// Removes test_frac / val_frac of the directed edges (rounded to nearest,
// sampled outside a deterministic breadth-first spanning forest of the
// undirected support so the residual stays as connected as the input), then
// builds labeled pairs per task:
//   existence   - removed edges are positives (label 0), non-adjacent ordered
//                 pairs negatives (label 1); 1 negative per positive with
//                 include_noisy (50/50) and 3 without... see below.
//   direction   - each removed edge is presented forward (label 0) or
//                 reversed (label 1), half and half.
//   three_class - half forward (0), half reversed (1), and as many
//                 non-adjacent pairs (2) as true edges, giving 25/25/50.
// include_noisy admits reciprocal-pair edges as candidates (existence task,
// positive/negative ratio 25/75); without it only single-direction edges
// participate and existence classes balance 50/50. Negative pairs never
// coincide with an original edge in either direction and never repeat across
// sets. Training observations are built from the residual edges by the same
// scheme.
LinkSplit link_split(const DirectedGraph& g, LinkTask task, double test_frac,
                     double val_frac, bool include_noisy, std::uint64_t seed);

void write_link_split_file(const std::string& path, const LinkSplit& s);
LinkSplit read_link_split_file(const std::string& path);

// Direction accuracy of a three-class model: restrict to pairs whose true
// label is 0 or 1 and compare argmax over classes {0, 1} only (ties go to
// class 0).
double eval_direction_from_three_class(const RealMatrix& probs,
                                       const std::vector<int>& true_labels);

}  // namespace magnet

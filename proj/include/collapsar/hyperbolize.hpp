#pragma once

// End-to-end construction: given a complex and a full collapse certificate,
// rebuild the complex step by step in reverse order, attaching for every
// undone collapse the block family of its reattachment disk and solving for
// hyperboloid coordinates with right angles along the glue faces. Earlier
// steps are frozen; the construction is strictly additive, which yields the
// nested images of the intermediate complexes.

#include <map>
#include <vector>

#include "collapsar/block_complex.hpp"
#include "collapsar/realize.hpp"

namespace collapsar {

namespace hyperbolize_detail {

struct FaceImage {
    std::vector<int> verts;
    std::vector<Face> tops;  // realized simplices of the face's dimension
};

inline bool chain_is_top(const FaceChain& chain, int gamma_dim) {
    if (face_dim(chain.back()) != gamma_dim) return false;
    for (std::size_t i = 0; i + 1 < chain.size(); ++i)
        if (face_dim(chain[i + 1]) != face_dim(chain[i]) + 1) return false;
    return true;
}

}  // namespace hyperbolize_detail

inline MetricComplex hyperbolize(const SimplicialComplex& c, const CollapseSequence& cert,
                                 const RealizeOptions& opts = {}) {
    using namespace hyperbolize_detail;

    auto verdict = replay(c, cert);
    if (!verdict.valid) {
        std::ostringstream msg;
        msg << "certificate does not replay: step " << verdict.first_failing_step << " ("
            << verdict.reason << ")";
        throw stale_step_error(msg.str());
    }

    // intermediate complexes, stages[i] --> stages[i+1] by collapse i
    std::vector<SimplicialComplex> stages{c};
    for (const auto& s : cert.steps)
        stages.push_back(stages.back().without_pair(s.free_face, s.coface));

    MetricComplex m;
    m.edge_scale = opts.edge_scale;
    m.seed = opts.seed;

    int next_id = 0;
    for (int v : c.vertices()) next_id = std::max(next_id, v + 1);

    std::map<Face, FaceImage> images;
    const int point_vertex = cert.terminal_vertex;
    images[{point_vertex}] = {{point_vertex}, {{point_vertex}}};
    m.vertex_labels[point_vertex] = "v" + std::to_string(point_vertex);

    std::vector<Face> all_tops = {{point_vertex}};
    {
        StepImage img;
        img.vertices = {point_vertex};
        img.tops = all_tops;
        m.steps.push_back(img);
    }

    m.residual.max_abs = 0.0;
    m.residual.sum_sq = 0.0;
    m.residual.success = true;

    const int n = static_cast<int>(cert.steps.size());
    for (int i = n - 1; i >= 0; --i) {
        const int step_number = n - i;
        const auto& pair = cert.steps[i];
        const auto& sigma = stages[i];

        FreeFaceDisk disk;
        std::vector<realize_detail::Brick> bricks;
        std::map<std::pair<int, std::vector<Face>>, int> composite;

        try {
            disk = free_face_disk(sigma, pair);
            const int gamma_dim = disk.gamma.dim();

            auto corner_id = [&](int x, const std::vector<Face>& subset) {
                if (subset.empty()) return x;
                auto key = std::make_pair(x, subset);
                auto it = composite.find(key);
                if (it != composite.end()) return it->second;
                int id = next_id++;
                composite.emplace(key, id);
                m.vertex_labels[id] = "w" + std::to_string(id);
                return id;
            };

            for (const auto& chain : enumerate_chains(disk)) {
                if (!chain_is_top(chain, gamma_dim)) continue;
                const auto& base_image = images.at(chain.front());
                for (const auto& s : base_image.tops) {
                    realize_detail::Brick brick;
                    brick.step = step_number;
                    brick.cell.base_corner_ids = s;
                    brick.cell.cube_dim = static_cast<int>(chain.size());
                    brick.cell.corner_ids.resize(brick.cell.corner_count());
                    for (unsigned mask = 0; mask < (1u << brick.cell.cube_dim); ++mask) {
                        std::vector<Face> subset;
                        for (std::size_t j = 0; j < chain.size(); ++j)
                            if (mask & (1u << j)) subset.push_back(chain[j]);
                        for (std::size_t b = 0; b < s.size(); ++b)
                            brick.cell.corner_ids[mask * s.size() + b] =
                                corner_id(s[b], subset);
                    }
                    bricks.push_back(std::move(brick));
                }
            }
        } catch (const error& e) {
            std::ostringstream msg;
            msg << "reverse step " << step_number << ": " << e.what();
            throw construction_error(msg.str());
        }

        auto step = realize_bricks(bricks, m.edge_length, opts, step_number);
        m.residual.per_step.push_back(step.max_abs);
        m.residual.iterations += step.iterations;
        m.residual.attempts = std::max(m.residual.attempts, step.attempts_used);
        m.residual.sum_sq += step.sum_sq;
        if (step.max_abs > m.residual.max_abs) {
            m.residual.max_abs = step.max_abs;
            m.residual.worst = step.worst;
        }
        if (!step.success) {
            m.residual.success = false;
            std::ostringstream msg;
            msg << "reverse step " << step_number << " stalled at residual " << step.max_abs
                << "; worst constraint: " << step.worst;
            throw realization_error(msg.str());
        }

        const int chart_offset = static_cast<int>(m.charts.size());
        for (auto& chart : step.charts) m.charts.push_back(std::move(chart));
        for (std::size_t t = 0; t < step.tops.size(); ++t) {
            m.chart_of[step.tops[t]] = chart_offset + step.top_chart[t];
            all_tops.push_back(step.tops[t]);
        }
        for (const auto& [key, len] : step.new_edge_lengths) m.edge_length[key] = len;
        for (auto rec : step.ridges) {
            rec.chart += chart_offset;
            m.glue_ridges.push_back(rec);
        }

        // update face images: the rebuilt coface and the freed face
        FaceImage coface_image;
        {
            std::set<int> verts;
            for (const auto& b : bricks)
                verts.insert(b.cell.corner_ids.begin(), b.cell.corner_ids.end());
            coface_image.verts.assign(verts.begin(), verts.end());
            coface_image.tops = step.tops;
        }

        FaceImage free_image;
        {
            // boundary facets of the rebuilt ball = codim-1 faces incident to
            // exactly one new top simplex
            std::map<Face, int> facet_count;
            for (const auto& top : step.tops)
                for (std::size_t drop = 0; drop < top.size(); ++drop) {
                    Face f = top;
                    f.erase(f.begin() + drop);
                    facet_count[f] += 1;
                }
            std::set<Face> gamma_facets;
            for (const auto& g : disk.gamma.facets())
                for (const auto& t : images.at(g).tops) gamma_facets.insert(t);
            std::set<int> verts;
            for (const auto& [f, count] : facet_count) {
                if (count != 1 || gamma_facets.count(f)) continue;
                free_image.tops.push_back(f);
                verts.insert(f.begin(), f.end());
            }
            free_image.verts.assign(verts.begin(), verts.end());
        }
        images[pair.coface] = coface_image;
        images[pair.free_face] = free_image;

        StepImage img;
        std::set<int> verts;
        for (const auto& [f, fi] : images)
            if (stages[i].has_face(f)) verts.insert(fi.verts.begin(), fi.verts.end());
        img.vertices.assign(verts.begin(), verts.end());
        img.tops = all_tops;
        m.steps.push_back(img);
    }

    // keep only the maximal realized simplices as the top list
    for (const auto& f : all_tops) {
        bool maximal = true;
        for (const auto& g : all_tops)
            if (g.size() > f.size() && face_subset(f, g)) {
                maximal = false;
                break;
            }
        if (maximal) m.top_simplices.push_back(f);
    }
    for (int v : c.vertices())
        if (!m.vertex_labels.count(v)) m.vertex_labels[v] = "v" + std::to_string(v);
    return m;
}

}  // namespace collapsar

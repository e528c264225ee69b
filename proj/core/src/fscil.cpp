#include "spikemark/fscil.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "spikemark/errors.hpp"
#include "spikemark/report.hpp"
#include "spikemark/rng.hpp"

namespace spikemark {

namespace {

void check_sample_shape(const embedding_sample& s, std::size_t dim, bool temporal) {
    if (temporal) {
        if (s.timesteps < 1 || s.values.size() != s.timesteps * dim)
            throw data_error("fscil: a temporal sample must hold timesteps x dim values");
    } else {
        if (s.timesteps != 1 || s.values.size() != dim)
            throw data_error("fscil: a sample must hold exactly one embedding of the "
                             "dataset dimension");
    }
}

}  // namespace

std::vector<double> compute_prototype(const std::vector<const embedding_sample*>& members,
                                      std::size_t dim, bool temporal) {
    if (members.empty())
        throw data_error("fscil: cannot build a prototype from an empty sample set");
    std::vector<double> proto(dim, 0.0);
    for (const auto* s : members) {
        check_sample_shape(*s, dim, temporal);
        for (std::size_t t = 0; t < s->timesteps; ++t)
            for (std::size_t j = 0; j < dim; ++j) proto[j] += s->values[t * dim + j];
    }
    for (double& v : proto) v /= static_cast<double>(members.size());
    return proto;
}

prototype_row prototype_weights(const std::vector<double>& c, bool temporal,
                                std::size_t t) {
    if (c.empty()) throw data_error("fscil: an empty prototype has no weights");
    if (temporal && t == 0)
        throw data_error("fscil: the temporal bias needs a positive timestep count");
    prototype_row row;
    row.w.reserve(c.size());
    double norm2 = 0.0;
    for (double v : c) {
        row.w.push_back(2.0 * v);
        norm2 += v * v;
    }
    row.b = temporal ? -norm2 / static_cast<double>(t) : -norm2;
    return row;
}

prototype_classifier replace_readout(
    const std::vector<std::pair<int, std::vector<double>>>& prototypes, bool temporal,
    std::size_t t) {
    if (prototypes.empty())
        throw data_error("fscil: a classifier needs at least one class prototype");

    auto ordered = prototypes;
    std::sort(ordered.begin(), ordered.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    prototype_classifier clf;
    clf.dim = ordered.front().second.size();
    clf.temporal = temporal;
    clf.t = temporal ? t : 1;
    for (const auto& [cls, proto] : ordered) {
        if (!clf.class_ids.empty() && clf.class_ids.back() == cls)
            throw data_error("fscil: duplicate prototype for class " + std::to_string(cls));
        if (proto.size() != clf.dim)
            throw data_error("fscil: prototype dimensions disagree");
        const auto row = prototype_weights(proto, temporal, t);
        clf.class_ids.push_back(cls);
        clf.weights.insert(clf.weights.end(), row.w.begin(), row.w.end());
        clf.biases.push_back(row.b);
    }
    return clf;
}

prototype_classifier extend_classifier(
    prototype_classifier classifier,
    const std::vector<std::pair<int, std::vector<double>>>& prototypes) {
    auto ordered = prototypes;
    std::sort(ordered.begin(), ordered.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [cls, proto] : ordered) {
        if (std::find(classifier.class_ids.begin(), classifier.class_ids.end(), cls) !=
            classifier.class_ids.end())
            throw data_error("fscil: class " + std::to_string(cls) +
                             " already has a classifier row");
        if (proto.size() != classifier.dim)
            throw data_error("fscil: prototype dimensions disagree");
        const auto row = prototype_weights(proto, classifier.temporal, classifier.t);
        classifier.class_ids.push_back(cls);
        classifier.weights.insert(classifier.weights.end(), row.w.begin(), row.w.end());
        classifier.biases.push_back(row.b);
    }
    return classifier;
}

int classify(const prototype_classifier& classifier, const embedding_sample& e) {
    if (classifier.class_ids.empty())
        throw data_error("fscil: cannot classify with an empty classifier");
    check_sample_shape(e, classifier.dim, classifier.temporal);

    int best_class = classifier.class_ids.front();
    double best_score = 0.0;
    for (std::size_t k = 0; k < classifier.class_ids.size(); ++k) {
        const double* w = classifier.weights.data() + k * classifier.dim;
        double score = 0.0;
        for (std::size_t t = 0; t < e.timesteps; ++t)
            for (std::size_t j = 0; j < classifier.dim; ++j)
                score += w[j] * e.values[t * classifier.dim + j];
        score += static_cast<double>(e.timesteps) * classifier.biases[k];
        if (k == 0 || score > best_score) {
            best_score = score;
            best_class = classifier.class_ids[k];
        }
    }
    return best_class;
}

void save_embedding_csv(const std::string& path, const embedding_dataset& ds) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("embeddings: cannot open '" + path + "' for writing");
    out << "class_id,t";
    for (std::size_t j = 0; j < ds.dim; ++j) out << ",e_" << j;
    out << "\n";
    for (const auto& s : ds.samples) {
        if (s.values.size() != s.timesteps * ds.dim)
            throw data_error("embeddings: sample data does not match the dataset dimension");
        for (std::size_t t = 0; t < s.timesteps; ++t) {
            out << s.class_id << "," << t;
            for (std::size_t j = 0; j < ds.dim; ++j)
                out << "," << format_double(s.values[t * ds.dim + j]);
            out << "\n";
        }
    }
    if (!out) throw data_error("embeddings: failed writing '" + path + "'");
}

embedding_dataset load_embedding_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("embeddings: cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line))
        throw data_error("embeddings: '" + path + "' is empty");
    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) header.push_back(cell);
    }
    if (header.size() < 3 || header[0] != "class_id" || header[1] != "t")
        throw data_error("embeddings: header must be 'class_id,t,e_0,...'");
    const std::size_t dim = header.size() - 2;
    for (std::size_t j = 0; j < dim; ++j)
        if (header[j + 2] != "e_" + std::to_string(j))
            throw data_error("embeddings: embedding columns must be named e_0..e_" +
                             std::to_string(dim - 1));

    embedding_dataset ds;
    ds.dim = dim;
    std::size_t row_no = 1;
    while (std::getline(in, line)) {
        ++row_no;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != dim + 2)
            throw data_error("embeddings: row " + std::to_string(row_no) + " has " +
                             std::to_string(cells.size()) + " cells, expected " +
                             std::to_string(dim + 2));
        const long long cls = static_cast<long long>(parse_double(cells[0]));
        const long long t = static_cast<long long>(parse_double(cells[1]));
        if (t == 0) {
            embedding_sample s;
            s.class_id = static_cast<int>(cls);
            s.timesteps = 0;
            ds.samples.push_back(std::move(s));
        } else if (ds.samples.empty() ||
                   t != static_cast<long long>(ds.samples.back().timesteps) ||
                   cls != ds.samples.back().class_id) {
            throw data_error("embeddings: row " + std::to_string(row_no) +
                             " does not continue a sample (new samples start at t=0)");
        }
        auto& s = ds.samples.back();
        for (std::size_t j = 0; j < dim; ++j) s.values.push_back(parse_double(cells[j + 2]));
        s.timesteps += 1;
    }
    if (ds.samples.empty())
        throw data_error("embeddings: '" + path + "' holds no samples");
    return ds;
}

embedding_dataset synthetic_clusters(int classes, std::size_t dim, int samples_per_class,
                                     double separation, double min_centroid_distance,
                                     double noise_sigma, std::uint64_t seed) {
    if (classes < 1 || dim < 1 || samples_per_class < 1)
        throw data_error("fscil: synthetic data needs at least one class, dimension and sample");
    if (!(separation > 0.0) || !(noise_sigma >= 0.0) || !(min_centroid_distance >= 0.0))
        throw data_error("fscil: synthetic cluster geometry must be non-negative");

    rng256 rng(seed);
    std::vector<std::vector<double>> centroids;
    const int kMaxAttempts = 100000;
    int attempts = 0;
    while (centroids.size() < static_cast<std::size_t>(classes)) {
        if (++attempts > kMaxAttempts)
            throw data_error("fscil: could not place " + std::to_string(classes) +
                             " centroids at pairwise distance " +
                             std::to_string(min_centroid_distance) +
                             "; relax the separation constraint");
        std::vector<double> c(dim);
        for (double& v : c) v = rng.uniform(-separation, separation);
        bool ok = true;
        for (const auto& other : centroids) {
            double d2 = 0.0;
            for (std::size_t j = 0; j < dim; ++j)
                d2 += (c[j] - other[j]) * (c[j] - other[j]);
            if (d2 < min_centroid_distance * min_centroid_distance) {
                ok = false;
                break;
            }
        }
        if (ok) centroids.push_back(std::move(c));
    }

    embedding_dataset ds;
    ds.dim = dim;
    ds.samples.reserve(static_cast<std::size_t>(classes) *
                       static_cast<std::size_t>(samples_per_class));
    for (int cls = 0; cls < classes; ++cls) {
        for (int i = 0; i < samples_per_class; ++i) {
            embedding_sample s;
            s.class_id = cls;
            s.timesteps = 1;
            s.values.reserve(dim);
            for (std::size_t j = 0; j < dim; ++j)
                s.values.push_back(centroids[static_cast<std::size_t>(cls)][j] +
                                   noise_sigma * rng.normal());
            ds.samples.push_back(std::move(s));
        }
    }
    return ds;
}

session_plan make_session_plan(const embedding_dataset& ds, int base_classes,
                               int sessions, int ways, int shots, int eval_per_class) {
    if (base_classes < 0 || sessions < 0 || ways < 0 || shots < 0)
        throw data_error("fscil: plan sizes must be non-negative");
    if (eval_per_class < 1)
        throw data_error("fscil: need at least one evaluation sample per class");
    if (sessions > 0 && (ways < 1 || shots < 1))
        throw data_error("fscil: incremental sessions need at least one class and one shot");

    std::map<int, int> counts;
    for (const auto& s : ds.samples) counts[s.class_id] += 1;
    std::vector<int> ids;
    ids.reserve(counts.size());
    for (const auto& [cls, n] : counts) ids.push_back(cls);

    const std::size_t required = static_cast<std::size_t>(base_classes) +
                                 static_cast<std::size_t>(sessions) *
                                     static_cast<std::size_t>(ways);
    if (required > ids.size())
        throw data_error("fscil: the plan needs " + std::to_string(required) +
                         " classes but the dataset has " + std::to_string(ids.size()));

    session_plan plan;
    plan.shots = shots;
    plan.eval_per_class = eval_per_class;
    std::size_t next = 0;
    for (int i = 0; i < base_classes; ++i) plan.base_classes.push_back(ids[next++]);
    for (int s = 0; s < sessions; ++s) {
        session_classes sc;
        for (int w = 0; w < ways; ++w) sc.class_ids.push_back(ids[next++]);
        plan.incremental.push_back(std::move(sc));
    }

    for (int cls : plan.base_classes) {
        if (counts[cls] < eval_per_class + 1)
            throw data_error("fscil: base class " + std::to_string(cls) + " has " +
                             std::to_string(counts[cls]) + " samples but needs " +
                             std::to_string(eval_per_class + 1) +
                             " (evaluation plus at least one for the prototype)");
    }
    for (const auto& sc : plan.incremental) {
        for (int cls : sc.class_ids) {
            if (counts[cls] < eval_per_class + shots)
                throw data_error("fscil: incremental class " + std::to_string(cls) +
                                 " has " + std::to_string(counts[cls]) +
                                 " samples but needs " +
                                 std::to_string(eval_per_class + shots));
        }
    }
    return plan;
}

feature_extractor identity_extractor() {
    return [](const embedding_sample& s) { return s; };
}

namespace {

struct class_split {
    std::vector<embedding_sample> train;  ///< extracted embeddings
    std::vector<embedding_sample> eval;
};

double accuracy_over(const prototype_classifier& clf,
                     const std::map<int, class_split>& splits,
                     const std::vector<int>& classes) {
    std::size_t hits = 0;
    std::size_t total = 0;
    for (int cls : classes) {
        for (const auto& e : splits.at(cls).eval) {
            ++total;
            if (classify(clf, e) == cls) ++hits;
        }
    }
    if (total == 0) throw data_error("fscil: no evaluation samples for the session");
    return static_cast<double>(hits) / static_cast<double>(total);
}

std::vector<std::pair<int, std::vector<double>>> prototypes_for(
    const std::map<int, class_split>& splits, const std::vector<int>& classes,
    std::size_t dim, bool temporal) {
    std::vector<std::pair<int, std::vector<double>>> rows;
    rows.reserve(classes.size());
    for (int cls : classes) {
        std::vector<const embedding_sample*> members;
        for (const auto& s : splits.at(cls).train) members.push_back(&s);
        rows.emplace_back(cls, compute_prototype(members, dim, temporal));
    }
    return rows;
}

}  // namespace

fscil_result run_fscil(const embedding_dataset& ds, const session_plan& plan,
                       fscil_mode mode, const feature_extractor& extractor,
                       bool temporal) {
    if (!extractor) throw data_error("fscil: a feature extractor is required");

    // Per-class sample lists in dataset order.
    std::map<int, std::vector<const embedding_sample*>> by_class;
    for (const auto& s : ds.samples) by_class[s.class_id].push_back(&s);

    std::set<int> incremental_ids;
    for (const auto& sc : plan.incremental)
        for (int cls : sc.class_ids) incremental_ids.insert(cls);

    std::vector<int> all_classes = plan.base_classes;
    for (const auto& sc : plan.incremental)
        all_classes.insert(all_classes.end(), sc.class_ids.begin(), sc.class_ids.end());

    std::map<int, class_split> splits;
    for (int cls : all_classes) {
        const auto it = by_class.find(cls);
        if (it == by_class.end())
            throw data_error("fscil: class " + std::to_string(cls) +
                             " from the plan is absent from the dataset");
        const auto& members = it->second;
        const auto eval_count = static_cast<std::size_t>(plan.eval_per_class);
        if (members.size() < eval_count + 1)
            throw data_error("fscil: class " + std::to_string(cls) +
                             " is too small for the requested evaluation split");
        const std::size_t train_end = members.size() - eval_count;
        class_split split;
        std::size_t train_take = train_end;
        if (incremental_ids.count(cls) != 0)
            train_take = std::min<std::size_t>(static_cast<std::size_t>(plan.shots), train_end);
        for (std::size_t i = 0; i < train_take; ++i)
            split.train.push_back(extractor(*members[i]));
        for (std::size_t i = train_end; i < members.size(); ++i)
            split.eval.push_back(extractor(*members[i]));
        splits.emplace(cls, std::move(split));
    }

    // The per-timestep bias convention needs the timestep count; take it from
    // the first available training embedding.
    std::size_t t_steps = 1;
    if (temporal) {
        for (int cls : all_classes) {
            if (!splits.at(cls).train.empty()) {
                t_steps = splits.at(cls).train.front().timesteps;
                break;
            }
        }
    }

    fscil_result result;
    result.mode = mode;

    auto clf = replace_readout(prototypes_for(splits, plan.base_classes, ds.dim, temporal),
                               temporal, t_steps);
    std::vector<int> seen = plan.base_classes;

    session_result base_session;
    base_session.session = 0;
    base_session.accuracy_all = accuracy_over(clf, splits, seen);
    base_session.accuracy_new = base_session.accuracy_all;
    base_session.classifier_rows = clf.class_ids.size();
    result.sessions.push_back(base_session);

    for (std::size_t s = 0; s < plan.incremental.size(); ++s) {
        const auto& sc = plan.incremental[s];
        if (mode == fscil_mode::prototypical)
            clf = extend_classifier(std::move(clf),
                                    prototypes_for(splits, sc.class_ids, ds.dim, temporal));
        seen.insert(seen.end(), sc.class_ids.begin(), sc.class_ids.end());

        session_result sr;
        sr.session = static_cast<int>(s) + 1;
        sr.accuracy_all = accuracy_over(clf, splits, seen);
        sr.accuracy_new = accuracy_over(clf, splits, sc.class_ids);
        sr.classifier_rows = clf.class_ids.size();
        result.sessions.push_back(sr);
    }

    double sum = 0;
    for (const auto& sr : result.sessions) sum += sr.accuracy_all;
    result.mean_accuracy_all = sum / static_cast<double>(result.sessions.size());
    return result;
}

}  // namespace spikemark

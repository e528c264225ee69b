#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include "oracle.hpp"
#include "spikemark/errors.hpp"
#include "spikemark/fscil.hpp"
#include "spikemark/rng.hpp"

using namespace spikemark;

namespace {

embedding_sample make_sample(int cls, std::vector<double> values) {
    embedding_sample s;
    s.class_id = cls;
    s.timesteps = 1;
    s.values = std::move(values);
    return s;
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_SUITE("fscil") {

TEST_CASE("a prototype is the elementwise mean") {
    const auto a = make_sample(0, {1, 3});
    CHECK(compute_prototype({&a}, 2, false) == std::vector<double>{1, 3});

    const auto b = make_sample(0, {0, 0});
    const auto c = make_sample(0, {2, 4});
    CHECK(compute_prototype({&b, &c}, 2, false) == std::vector<double>{1, 2});
}

TEST_CASE("temporal prototypes sum each sample over time first") {
    embedding_sample s;
    s.class_id = 0;
    s.timesteps = 3;
    s.values = {1, 2, 3};  // scalar embedding per timestep
    CHECK(compute_prototype({&s}, 1, true) == std::vector<double>{6});
}

TEST_CASE("prototype computation rejects empty and mismatched input") {
    CHECK_THROWS_AS(compute_prototype({}, 2, false), data_error);
    const auto a = make_sample(0, {1, 2});
    const auto b = make_sample(0, {1, 2, 3});
    CHECK_THROWS_AS(compute_prototype({&a, &b}, 2, false), data_error);
}

TEST_CASE("prototype rows are twice the centroid with squared-norm bias") {
    const auto row = prototype_weights({1, 3}, false, 1);
    CHECK(row.w == std::vector<double>{2, 6});
    CHECK(row.b == -10.0);

    const auto zero = prototype_weights({0, 0}, false, 1);
    CHECK(zero.w == std::vector<double>{0, 0});
    CHECK(zero.b == 0.0);
}

TEST_CASE("temporal prototype rows divide the bias by the timestep count") {
    const auto row = prototype_weights({2}, true, 4);
    CHECK(row.w == std::vector<double>{4});
    CHECK(row.b == -1.0);
    CHECK_THROWS_AS(prototype_weights({2}, true, 0), data_error);
}

TEST_CASE("readout replacement keeps one ordered row per class") {
    const auto clf = replace_readout({{1, {0.0}}, {0, {2.0}}}, false, 1);
    REQUIRE(clf.class_ids == std::vector<int>{0, 1});
    CHECK(clf.weights == std::vector<double>{4.0, 0.0});  // class 0 first
    CHECK(clf.biases == std::vector<double>{-4.0, 0.0});
}

TEST_CASE("readout replacement rejects duplicates and empty sets") {
    CHECK_THROWS_AS(replace_readout({}, false, 1), data_error);
    CHECK_THROWS_AS(replace_readout({{3, {1.0}}, {3, {2.0}}}, false, 1), data_error);
}

TEST_CASE("extension appends rows without touching existing ones") {
    auto clf = replace_readout({{0, {0.0}}, {1, {2.0}}}, false, 1);
    const auto before_w = clf.weights;
    const auto grown = extend_classifier(clf, {{5, {1.0}}});
    REQUIRE(grown.class_ids == std::vector<int>{0, 1, 5});
    CHECK(std::equal(before_w.begin(), before_w.end(), grown.weights.begin()));
    CHECK(grown.weights[2] == 2.0);
    CHECK(grown.biases[2] == -1.0);

    const auto same = extend_classifier(grown, {});
    CHECK(same.class_ids == grown.class_ids);
    CHECK_THROWS_AS(extend_classifier(grown, {{5, {9.0}}}), data_error);
}

TEST_CASE("classification picks the nearest prototype") {
    const auto clf = replace_readout({{1, {0.0}}, {2, {2.0}}}, false, 1);
    CHECK(classify(clf, make_sample(-1, {0.5})) == 1);
    CHECK(classify(clf, make_sample(-1, {1.9})) == 2);
    // A sample exactly on a prototype belongs to it.
    CHECK(classify(clf, make_sample(-1, {2.0})) == 2);
}

TEST_CASE("equidistant samples go to the lowest class id") {
    const auto clf = replace_readout({{4, {0.0}}, {9, {2.0}}}, false, 1);
    CHECK(classify(clf, make_sample(-1, {1.0})) == 4);
}

TEST_CASE("classification scores match nearest-centroid over random draws") {
    rng256 g(17);
    const std::size_t dim = 5;
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::vector<double>> centroids;
        std::vector<std::pair<int, std::vector<double>>> prototypes;
        for (int k = 0; k < 4; ++k) {
            std::vector<double> c(dim);
            for (auto& x : c) x = g.uniform(-2.0, 2.0);
            centroids.push_back(c);
            prototypes.emplace_back(k, c);
        }
        const auto clf = replace_readout(prototypes, false, 1);
        std::vector<double> e(dim);
        for (auto& x : e) x = g.uniform(-2.0, 2.0);
        CHECK(classify(clf, make_sample(-1, e)) ==
              static_cast<int>(oracle::nearest_centroid(centroids, e)));
    }
}

TEST_CASE("temporal classification sums scores over timesteps") {
    // Prototype c=[2] over summed embeddings, T=4.
    const auto clf = replace_readout({{0, {2.0}}, {1, {-6.0}}}, true, 4);
    embedding_sample e;
    e.class_id = -1;
    e.timesteps = 4;
    e.values = {0.5, 0.5, 0.5, 0.5};  // sums to 2 = prototype 0
    CHECK(classify(clf, e) == 0);
    embedding_sample e2 = e;
    e2.values = {-1.5, -1.5, -1.5, -1.5};  // sums to -6
    CHECK(classify(clf, e2) == 1);
}

TEST_CASE("classification rejects dimension mismatches") {
    const auto clf = replace_readout({{0, {1.0, 2.0}}}, false, 1);
    CHECK_THROWS_AS(classify(clf, make_sample(-1, {1.0})), data_error);
}

TEST_CASE("the embedding CSV round trips") {
    embedding_dataset ds;
    ds.dim = 2;
    ds.samples.push_back(make_sample(0, {0.25, -1.5}));
    ds.samples.push_back(make_sample(0, {0.1 + 0.2, 3.0}));
    embedding_sample temporal;
    temporal.class_id = 1;
    temporal.timesteps = 2;
    temporal.values = {1.0, 2.0, 3.0, 4.0};
    ds.samples.push_back(temporal);

    const auto path = temp_path("embeddings_roundtrip.csv");
    save_embedding_csv(path, ds);
    const auto back = load_embedding_csv(path);
    REQUIRE(back.samples.size() == 3);
    CHECK(back.dim == 2);
    CHECK(back.samples[0].values == ds.samples[0].values);
    CHECK(back.samples[1].values[0] == ds.samples[1].values[0]);  // exact double
    CHECK(back.samples[2].timesteps == 2);
    CHECK(back.samples[2].values == temporal.values);
    std::filesystem::remove(path);
}

TEST_CASE("the embedding CSV loader rejects malformed files") {
    const auto path = temp_path("embeddings_bad.csv");
    {
        std::ofstream out(path);
        out << "class_id,t,e_0\n0,1,0.5\n";  // first row of a sample must start at t=0
    }
    CHECK_THROWS_AS(load_embedding_csv(path), data_error);
    {
        std::ofstream out(path);
        out << "bogus,header\n";
    }
    CHECK_THROWS_AS(load_embedding_csv(path), data_error);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_embedding_csv("/nonexistent/file.csv"), data_error);
}

TEST_CASE("synthetic clusters are deterministic and separated") {
    const auto a = synthetic_clusters(6, 16, 30, 10.0, 8.0, 0.5, 123);
    const auto b = synthetic_clusters(6, 16, 30, 10.0, 8.0, 0.5, 123);
    REQUIRE(a.samples.size() == 6 * 30);
    CHECK(a.dim == 16);
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        CHECK(a.samples[i].class_id == b.samples[i].class_id);
        CHECK(a.samples[i].values == b.samples[i].values);
    }

    // Per-class means are far apart relative to the noise.
    std::vector<std::vector<double>> means(6, std::vector<double>(16, 0.0));
    std::vector<int> counts(6, 0);
    for (const auto& s : a.samples) {
        for (std::size_t j = 0; j < 16; ++j) means[static_cast<std::size_t>(s.class_id)][j] += s.values[j];
        counts[static_cast<std::size_t>(s.class_id)]++;
    }
    for (std::size_t k = 0; k < 6; ++k) {
        REQUIRE(counts[k] == 30);
        for (auto& v : means[k]) v /= 30.0;
    }
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = i + 1; j < 6; ++j) {
            double d2 = 0.0;
            for (std::size_t t = 0; t < 16; ++t)
                d2 += (means[i][t] - means[j][t]) * (means[i][t] - means[j][t]);
            CHECK(std::sqrt(d2) > 4.0);
        }
}

TEST_CASE("session plans split per class in dataset order") {
    // 3 classes, 10 samples each; base 1 class, 2 sessions of 1 class,
    // 2 shots, 3 eval per class.
    embedding_dataset ds;
    ds.dim = 1;
    for (int cls = 0; cls < 3; ++cls)
        for (int i = 0; i < 10; ++i)
            ds.samples.push_back(make_sample(cls, {cls * 100.0 + i}));
    const auto plan = make_session_plan(ds, 1, 2, 1, 2, 3);
    CHECK(plan.base_classes == std::vector<int>{0});
    REQUIRE(plan.incremental.size() == 2);
    CHECK(plan.incremental[0].class_ids == std::vector<int>{1});
    CHECK(plan.incremental[1].class_ids == std::vector<int>{2});
    CHECK(plan.shots == 2);
    CHECK(plan.eval_per_class == 3);
}

TEST_CASE("session plans reject impossible splits") {
    embedding_dataset ds;
    ds.dim = 1;
    for (int i = 0; i < 4; ++i) ds.samples.push_back(make_sample(0, {1.0 * i}));
    // 4 samples cannot provide 3 eval + 2 shots.
    CHECK_THROWS_AS(make_session_plan(ds, 0, 1, 1, 2, 3), data_error);
    // More session classes than classes in the data.
    CHECK_THROWS_AS(make_session_plan(ds, 1, 1, 1, 1, 1), data_error);
}

TEST_CASE("the prototypical protocol learns every session of separable clusters") {
    const auto ds = synthetic_clusters(5, 8, 20, 12.0, 10.0, 0.3, 7);
    const auto plan = make_session_plan(ds, 2, 3, 1, 5, 5);
    const auto res = run_fscil(ds, plan, fscil_mode::prototypical, identity_extractor());
    REQUIRE(res.sessions.size() == 4);
    CHECK(res.sessions[0].classifier_rows == 2);
    CHECK(res.sessions[3].classifier_rows == 5);
    for (const auto& s : res.sessions) {
        CHECK(s.accuracy_all >= 0.99);
        CHECK(s.accuracy_new >= 0.99);
    }
    CHECK(res.mean_accuracy_all >= 0.99);
}

TEST_CASE("the frozen baseline never learns new classes") {
    const auto ds = synthetic_clusters(4, 8, 20, 12.0, 10.0, 0.3, 11);
    const auto plan = make_session_plan(ds, 2, 2, 1, 5, 5);
    const auto res = run_fscil(ds, plan, fscil_mode::frozen, identity_extractor());
    REQUIRE(res.sessions.size() == 3);
    CHECK(res.sessions[0].accuracy_all >= 0.99);
    for (std::size_t t = 1; t < 3; ++t) {
        CHECK(res.sessions[t].accuracy_new == 0.0);   // unseen rows cannot win
        CHECK(res.sessions[t].classifier_rows == 2);  // untouched classifier
    }
}

TEST_CASE("one base class and no sessions gives perfect trivial accuracy") {
    embedding_dataset ds;
    ds.dim = 1;
    for (int i = 0; i < 6; ++i) ds.samples.push_back(make_sample(0, {0.1 * i}));
    const auto plan = make_session_plan(ds, 1, 0, 0, 0, 3);
    const auto res = run_fscil(ds, plan, fscil_mode::prototypical, identity_extractor());
    REQUIRE(res.sessions.size() == 1);
    CHECK(res.sessions[0].accuracy_all == 1.0);
}

TEST_CASE("sample order within a class does not change prototypes") {
    const auto a = make_sample(0, {1.0, 2.0});
    const auto b = make_sample(0, {3.0, -2.0});
    const auto c = make_sample(0, {0.5, 0.5});
    const auto p1 = compute_prototype({&a, &b, &c}, 2, false);
    const auto p2 = compute_prototype({&c, &a, &b}, 2, false);
    CHECK(p1 == p2);
}

}  // TEST_SUITE

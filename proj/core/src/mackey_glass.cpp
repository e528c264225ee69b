#include "spikemark/mackey_glass.hpp"

#include <cmath>
#include <cstddef>
#include <fstream>
#include <sstream>

#include "spikemark/errors.hpp"
#include "spikemark/metrics.hpp"
#include "spikemark/report.hpp"

namespace spikemark {

namespace {

/// x^n for integer n >= 0 by binary exponentiation: deterministic and exact
/// where the inputs are exact (notably 1^n == 1).
double ipow(double x, int n) {
    double result = 1.0;
    double base = x;
    for (int e = n; e > 0; e >>= 1) {
        if (e & 1) result *= base;
        base *= base;
    }
    return result;
}

/// Dense trajectory storage for delayed lookups: values and derivatives on
/// the fixed integration grid, interpolated with a cubic Hermite form that is
/// exact for constant data (every correction term vanishes).
struct dense_grid {
    double h = 0;
    double x0 = 0;
    std::vector<double> x;
    std::vector<double> d;

    double operator()(double t) const {
        if (t <= 0.0) return x0;
        const double u = t / h;
        std::size_t j = static_cast<std::size_t>(u);
        if (j + 1 >= x.size()) j = x.size() - 2;
        const double s = u - static_cast<double>(j);
        if (s == 0.0) return x[j];
        const double delta = x[j + 1] - x[j];
        const double a = d[j] * h - delta;
        const double b = delta - d[j + 1] * h;
        return x[j] + s * delta + s * (1.0 - s) * (a * (1.0 - s) + b * s);
    }
};

}  // namespace

void mg_params::validate() const {
    if (n < 1) throw data_error("mackey-glass: nonlinearity exponent must be at least 1");
    if (!(beta > 0.0) || !std::isfinite(beta) || !(gamma > 0.0) || !std::isfinite(gamma))
        throw data_error("mackey-glass: drive and decay rates must be positive and finite");
    if (!(tau > 0.0) || !std::isfinite(tau))
        throw data_error("mackey-glass: the delay must be positive and finite");
    if (!std::isfinite(x0))
        throw data_error("mackey-glass: the initial value must be finite");
    if (!(dt_int > 0.0) || !std::isfinite(dt_int))
        throw data_error("mackey-glass: the integration step must be positive and finite");
    if (dt_int > tau)
        throw data_error(
            "mackey-glass: the integration step must not exceed the delay, or the "
            "delayed lookup would need values newer than the current state");
    if (lyapunov_time <= 0)
        throw data_error("mackey-glass: the Lyapunov time must be positive");
}

double mg_derivative(const mg_params& p, double x, double x_delayed) {
    return p.beta * x_delayed / (1.0 + ipow(x_delayed, p.n)) - p.gamma * x;
}

const std::map<int, mg_tau_entry>& mg_tau_table() {
    static const std::map<int, mg_tau_entry> table = {
        {17, {197, 0.7206597}}, {18, {138, 0.7744313}}, {19, {315, 0.7783468}},
        {20, {131, 0.9225991}}, {21, {191, 0.9479431}}, {22, {119, 0.5455960}},
        {23, {106, 0.8622247}}, {24, {97, 0.3259660}},  {25, {98, 0.8297825}},
        {26, {104, 1.0033490}}, {27, {112, 0.6491406}}, {28, {119, 1.0957495}},
        {29, {131, 0.9256179}}, {30, {139, 0.2713639}},
    };
    return table;
}

mg_params mg_params_for_tau(int tau, double dt_int) {
    const auto& table = mg_tau_table();
    const auto it = table.find(tau);
    if (it == table.end())
        throw data_error("mackey-glass: no benchmark constants for tau " +
                         std::to_string(tau) + "; supported delays are 17..30");
    mg_params p;
    p.tau = static_cast<double>(tau);
    p.x0 = it->second.x0;
    p.lyapunov_time = it->second.lyapunov_time;
    p.dt_int = dt_int;
    p.validate();
    return p;
}

mg_series integrate_mg(const mg_params& p, int duration_lyapunov) {
    p.validate();
    if (duration_lyapunov < 1)
        throw data_error("mackey-glass: the sampled duration must be at least one Lyapunov time");

    const double kBlowUp = 1e6;
    const double h = p.dt_int;
    const double lyap = static_cast<double>(p.lyapunov_time);
    const double burn_in = 10.0 * lyap;
    const double total_time = burn_in + static_cast<double>(duration_lyapunov) * lyap;
    const std::size_t steps = static_cast<std::size_t>(std::ceil(total_time / h)) + 2;

    dense_grid grid;
    grid.h = h;
    grid.x0 = p.x0;
    grid.x.reserve(steps + 1);
    grid.d.reserve(steps + 1);

    if (std::abs(p.x0) > kBlowUp)
        throw numeric_error("mackey-glass: |x| exceeded 1e6 at step 0");
    grid.x.push_back(p.x0);
    grid.d.push_back(mg_derivative(p, p.x0, grid(0.0 - p.tau)));

    for (std::size_t k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k) * h;
        const double x = grid.x[k];
        // Classical RK4; every delayed lookup lands at or before t because the
        // step never exceeds the delay.
        const double k1 = mg_derivative(p, x, grid(t - p.tau));
        const double xd_mid = grid(t + 0.5 * h - p.tau);
        const double k2 = mg_derivative(p, x + 0.5 * h * k1, xd_mid);
        const double k3 = mg_derivative(p, x + 0.5 * h * k2, xd_mid);
        const double k4 = mg_derivative(p, x + h * k3, grid(t + h - p.tau));
        const double x_next = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

        if (!std::isfinite(x_next) || std::abs(x_next) > kBlowUp)
            throw numeric_error("mackey-glass: |x| exceeded 1e6 at step " +
                                std::to_string(k + 1));
        grid.x.push_back(x_next);
        grid.d.push_back(
            mg_derivative(p, x_next, grid(static_cast<double>(k + 1) * h - p.tau)));
    }

    mg_series s;
    s.params = p;
    s.total_lyapunov_times = duration_lyapunov;
    const std::size_t samples = 75 * static_cast<std::size_t>(duration_lyapunov) + 1;
    s.values.reserve(samples);
    const double stride = lyap / 75.0;
    for (std::size_t k = 0; k < samples; ++k)
        s.values.push_back(grid(burn_in + static_cast<double>(k) * stride));
    return s;
}

std::vector<mg_instance> make_instances(const mg_series& s, int count) {
    if (count < 1) throw data_error("mackey-glass: instance count must be positive");
    std::vector<mg_instance> instances;
    instances.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const auto start = static_cast<std::size_t>(
            std::llround(static_cast<double>(i) * 37.5));
        const std::size_t end = start + 1500;
        if (end >= s.values.size())
            throw data_error(
                "mackey-glass: series too short for " + std::to_string(count) +
                " instances: instance " + std::to_string(i) + " needs points up to " +
                std::to_string(end) + " but only " + std::to_string(s.values.size()) +
                " are available");
        mg_instance inst;
        inst.index = i;
        inst.train.assign(s.values.begin() + static_cast<std::ptrdiff_t>(start),
                          s.values.begin() + static_cast<std::ptrdiff_t>(start + 751));
        inst.eval.assign(s.values.begin() + static_cast<std::ptrdiff_t>(start + 751),
                         s.values.begin() + static_cast<std::ptrdiff_t>(end + 1));
        instances.push_back(std::move(inst));
    }
    return instances;
}

namespace {

constexpr const char* kSeriesTag = "mackey-glass-series,1";

std::int64_t parse_int(const std::string& text, const char* what) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(text, &pos);
        if (pos != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw data_error(std::string("series cache: bad integer for ") + what + ": '" +
                         text + "'");
    }
}

}  // namespace

void save_series_csv(const std::string& path, const mg_series& s) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("series cache: cannot open '" + path + "' for writing");
    out << "# " << kSeriesTag << "\n";
    out << "# n," << s.params.n << "\n";
    out << "# beta," << format_double(s.params.beta) << "\n";
    out << "# gamma," << format_double(s.params.gamma) << "\n";
    out << "# tau," << format_double(s.params.tau) << "\n";
    out << "# x0," << format_double(s.params.x0) << "\n";
    out << "# dt_int," << format_double(s.params.dt_int) << "\n";
    out << "# lyapunov_time," << s.params.lyapunov_time << "\n";
    out << "# total_lyapunov_times," << s.total_lyapunov_times << "\n";
    out << "t,x\n";
    const double burn_in = 10.0 * static_cast<double>(s.params.lyapunov_time);
    const double stride = static_cast<double>(s.params.lyapunov_time) / 75.0;
    for (std::size_t k = 0; k < s.values.size(); ++k) {
        const double t = burn_in + static_cast<double>(k) * stride;
        out << format_double(t) << "," << format_double(s.values[k]) << "\n";
    }
    if (!out) throw data_error("series cache: failed writing '" + path + "'");
}

mg_series load_series_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("series cache: cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line) || line != std::string("# ") + kSeriesTag)
        throw data_error("series cache: '" + path + "' does not start with the format tag");

    std::map<std::string, std::string> header;
    while (in.peek() == '#') {
        if (!std::getline(in, line)) break;
        const auto comma = line.find(',');
        if (line.size() < 3 || comma == std::string::npos || comma < 3)
            throw data_error("series cache: malformed header line '" + line + "'");
        header[line.substr(2, comma - 2)] = line.substr(comma + 1);
    }
    const auto need = [&](const char* key) -> const std::string& {
        const auto it = header.find(key);
        if (it == header.end())
            throw data_error(std::string("series cache: missing header entry '") + key + "'");
        return it->second;
    };

    mg_series s;
    s.params.n = static_cast<int>(parse_int(need("n"), "n"));
    s.params.beta = parse_double(need("beta"));
    s.params.gamma = parse_double(need("gamma"));
    s.params.tau = parse_double(need("tau"));
    s.params.x0 = parse_double(need("x0"));
    s.params.dt_int = parse_double(need("dt_int"));
    s.params.lyapunov_time = static_cast<int>(parse_int(need("lyapunov_time"), "lyapunov_time"));
    s.total_lyapunov_times =
        static_cast<int>(parse_int(need("total_lyapunov_times"), "total_lyapunov_times"));
    s.params.validate();

    if (!std::getline(in, line) || line != "t,x")
        throw data_error("series cache: missing 't,x' column header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw data_error("series cache: malformed row '" + line + "'");
        s.values.push_back(parse_double(line.substr(comma + 1)));
    }

    const std::size_t expected = 75 * static_cast<std::size_t>(s.total_lyapunov_times) + 1;
    if (s.values.size() != expected)
        throw data_error("series cache: expected " + std::to_string(expected) +
                         " samples but found " + std::to_string(s.values.size()));
    return s;
}

chaotic_report run_chaotic_benchmark(const mg_series& series, int count,
                                     const forecaster_factory& factory) {
    const auto instances = make_instances(series, count);
    chaotic_report report;
    report.instance_smape.reserve(instances.size());
    for (const auto& inst : instances) {
        auto model = factory(inst.index);
        if (!model) throw data_error("chaotic benchmark: the factory returned no forecaster");
        model->train(inst.train);
        const auto predictions = model->forecast(inst.eval.size());
        report.instance_smape.push_back(smape(predictions, inst.eval));
    }
    double sum = 0;
    for (double v : report.instance_smape) sum += v;
    report.mean_smape = sum / static_cast<double>(report.instance_smape.size());
    return report;
}

}  // namespace spikemark

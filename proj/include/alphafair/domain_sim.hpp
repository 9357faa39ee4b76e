#ifndef ALPHAFAIR_DOMAIN_SIM_HPP_
#define ALPHAFAIR_DOMAIN_SIM_HPP_

#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "alphafair/instance.hpp"
#include "alphafair/solvers.hpp"

namespace alphafair {

// One SDN domain controller. It only stores state for the links it owns and
// the routes crossing them; route and link ids are global.
struct ControllerNode {
    struct OwnedLink {
        int link = 0;
        double capacity = 0.0;
        std::vector<int> routes;  // local route indices, ascending global id
        std::vector<double> z;
        std::vector<double> u;
    };
    struct Copy {
        int owned = 0;  // index into links
        int slot = 0;
    };

    int domain = 0;
    std::vector<OwnedLink> links;  // J_p, ascending
    std::vector<int> routes;       // R_p, ascending global ids

    // Per known route (local index).
    std::vector<double> weight;
    std::vector<double> bottleneck;
    std::vector<std::size_t> route_length;  // |J_r|
    std::vector<std::vector<int>> domains;  // I_r without 0, ascending, includes this domain
    std::vector<std::vector<Copy>> copies;  // own copies of the route, ascending link id
    std::vector<double> z0, u0, z_tilde, z_star;

    // Values received last round, aligned with domains[i].
    std::vector<std::vector<double>> inbox_z;
    std::vector<std::vector<double>> inbox_z_star;
    std::vector<std::vector<char>> inbox_seen;

    std::vector<RouteMessage> outbox;

    int local_index(int route) const;  // -1 when the route is unknown here
};

// Floats sent per round and ordered domain pair (from, to).
struct OverheadMeter {
    std::vector<std::map<std::pair<int, int>, long>> per_round;
};

struct OverheadReport {
    long rounds = 0;
    std::map<std::pair<int, int>, long> per_pair;  // totals over all rounds
    std::vector<long> per_domain;                  // totals sent, index 0 unused
    std::vector<long> predicted_per_round;         // 2 sum_{q != p} |R_p n R_q|
    long total = 0;
    bool matches_prediction = false;
};

// Predicted floats sent by each domain per round (index 0 unused).
std::vector<long> predicted_overhead(const Partition& partition);

class DomainSimulation {
 public:
    // Uses config.lambda / config.tau / config.workers. Inboxes are seeded with
    // the messages the initial link copies would produce.
    DomainSimulation(const Instance& instance, const Partition& partition, const SolverConfig& config,
                     bool log_messages = false);

    // Penalty update (if adaptive), then receive, enforce, average, link and
    // route updates, send, and delivery.
    void run_round();
    void run(long rounds);

    void inject_weight_update(std::span<const double> weights);

    // Lossy channel: messages for which keep() is false are dropped in transit.
    void set_delivery_filter(std::function<bool(const RouteMessage&)> keep) { keep_ = std::move(keep); }

    // State of the whole network assembled from the controllers.
    SolverState global_state() const;
    // True when every replica of z0/u0/z~/z* agrees bit for bit.
    bool replicas_agree() const;

    const std::vector<ControllerNode>& controllers() const { return nodes_; }
    const OverheadMeter& meter() const { return meter_; }
    OverheadReport measure_overhead() const;
    const std::vector<RouteMessage>& message_log() const { return log_; }
    void write_message_log(const std::string& path) const;

    long round() const { return round_; }
    double lambda() const { return penalty_.lambda; }
    const Residuals& residuals() const { return residuals_; }

 private:
    void deliver(std::vector<std::map<std::pair<int, int>, long>>* meter);
    void enforce_min();

    Instance instance_;
    Partition partition_;
    std::vector<ControllerNode> nodes_;  // nodes_[p - 1] is domain p
    PenaltyState penalty_;
    double alpha_;
    int workers_;
    long round_ = 0;
    Residuals residuals_;
    OverheadMeter meter_;
    bool log_messages_;
    std::vector<RouteMessage> log_;
    std::function<bool(const RouteMessage&)> keep_;
};

}  // namespace alphafair

#endif  // ALPHAFAIR_DOMAIN_SIM_HPP_

#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "fogdisc/jsonld.hpp"
#include "fogdisc/taxonomy.hpp"
#include "fogdisc/triples.hpp"

namespace fogdisc {

/// Local Thing Directory and Local Service Registry of one gateway, with the
/// concept/keyword inverted index and sector bookkeeping. Mutations are
/// serialized by the owning gateway's event loop.
class Directory {
 public:
  Directory(const Taxonomy* taxonomy, unsigned gateway_ordinal)
      : taxonomy_(taxonomy), ordinal_(gateway_ordinal) {}

  // -- registration -------------------------------------------------------

  Identifier post_thing(ThingDescription d) {
    if (d.id) raise(Errc::already_has_id, d.id->render());
    require_concept(d.concept_iri);
    d.location.validate();
    Identifier id{EntityKind::thing, ordinal_, ++next_thing_seq_};
    d.id = id;
    things_.emplace(id, std::move(d));
    last_refresh_[id] = 0.0;
    return id;
  }

  Identifier post_service(ServiceDescription s) {
    if (s.id) raise(Errc::already_has_id, s.id->render());
    if (!s.thing_id) raise(Errc::unknown_thing, "unset thing_id");
    if (!things_.count(*s.thing_id)) raise(Errc::unknown_thing, s.thing_id->render());
    require_concept(s.functional_concept);
    s.qos.validate();
    Identifier id{EntityKind::service, ordinal_, ++next_service_seq_};
    s.id = id;
    s.sector = assign_sector(s.functional_concept);
    sectors_[s.sector].insert(id);
    index_add(id, s);
    services_.emplace(id, std::move(s));
    return id;
  }

  // -- reads ---------------------------------------------------------------

  const ThingDescription& get_thing(const Identifier& id) const {
    auto it = things_.find(id);
    if (it == things_.end()) raise(Errc::not_found, id.render());
    return it->second;
  }

  const ServiceDescription& get_service(const Identifier& id) const {
    auto it = services_.find(id);
    if (it == services_.end()) raise(Errc::not_found, id.render());
    return it->second;
  }

  Description get_entry(const Identifier& id) const {
    if (id.kind == EntityKind::thing) return get_thing(id);
    if (id.kind == EntityKind::service) return get_service(id);
    raise(Errc::not_found, id.render());
  }

  bool has_thing(const Identifier& id) const { return things_.count(id) != 0; }
  bool has_service(const Identifier& id) const { return services_.count(id) != 0; }

  // -- updates -------------------------------------------------------------

  void put_thing(const Identifier& id, ThingDescription d) {
    auto it = things_.find(id);
    if (it == things_.end()) raise(Errc::not_found, id.render());
    require_concept(d.concept_iri);
    d.location.validate();
    d.id = id;
    it->second = std::move(d);
  }

  // A put may change the functional concept; sector and index follow.
  void put_service(const Identifier& id, ServiceDescription s) {
    auto it = services_.find(id);
    if (it == services_.end()) raise(Errc::not_found, id.render());
    require_concept(s.functional_concept);
    s.qos.validate();
    if (!s.thing_id) s.thing_id = it->second.thing_id;
    if (!things_.count(*s.thing_id)) raise(Errc::unknown_thing, s.thing_id->render());
    index_remove(id, it->second);
    sectors_[it->second.sector].erase(id);
    s.id = id;
    s.sector = assign_sector(s.functional_concept);
    sectors_[s.sector].insert(id);
    index_add(id, s);
    it->second = std::move(s);
    prune_empty_sectors();
  }

  // -- deletes -------------------------------------------------------------

  // Deleting a thing cascades to its services; the removed service ids are
  // returned so the caller can emit ServiceRemoved events.
  std::vector<Identifier> delete_thing(const Identifier& id) {
    auto it = things_.find(id);
    if (it == things_.end()) raise(Errc::not_found, id.render());
    std::vector<Identifier> removed;
    for (auto sit = services_.begin(); sit != services_.end();) {
      if (sit->second.thing_id == id) {
        index_remove(sit->first, sit->second);
        sectors_[sit->second.sector].erase(sit->first);
        removed.push_back(sit->first);
        sit = services_.erase(sit);
      } else {
        ++sit;
      }
    }
    things_.erase(it);
    last_refresh_.erase(id);
    prune_empty_sectors();
    return removed;
  }

  void delete_service(const Identifier& id) {
    auto it = services_.find(id);
    if (it == services_.end()) raise(Errc::not_found, id.render());
    index_remove(id, it->second);
    sectors_[it->second.sector].erase(id);
    services_.erase(it);
    prune_empty_sectors();
  }

  std::vector<Identifier> delete_entry(const Identifier& id) {
    if (id.kind == EntityKind::thing) return delete_thing(id);
    delete_service(id);
    return {id};
  }

  // -- sectors and index ----------------------------------------------------

  unsigned assign_sector(const std::string& concept_iri) const {
    return taxonomy_->sector_of(concept_iri);
  }

  // Exactly { s | subsumes(concept, s.functional_concept) }, answered from
  // the ancestor-closure index without scanning the registry.
  std::set<Identifier> index_lookup(const std::string& concept_iri) const {
    auto it = by_concept_.find(concept_iri);
    return it == by_concept_.end() ? std::set<Identifier>{} : it->second;
  }

  std::set<Identifier> keyword_lookup(const std::string& kw) const {
    auto it = by_keyword_.find(kw);
    return it == by_keyword_.end() ? std::set<Identifier>{} : it->second;
  }

  bool audit_index() const {
    std::map<std::string, std::set<Identifier>> concept_scan;
    std::map<std::string, std::set<Identifier>> keyword_scan;
    for (const auto& [id, s] : services_) {
      for (const auto& anc : taxonomy_->ancestors_of(s.functional_concept))
        concept_scan[anc].insert(id);
      for (const auto& kw : s.keywords) keyword_scan[kw].insert(id);
    }
    return concept_scan == by_concept_ && keyword_scan == by_keyword_;
  }

  // -- iteration ------------------------------------------------------------

  const std::map<Identifier, ThingDescription>& things() const { return things_; }
  const std::map<Identifier, ServiceDescription>& services() const { return services_; }
  const std::map<unsigned, std::set<Identifier>>& sectors() const { return sectors_; }
  const Taxonomy& taxonomy() const { return *taxonomy_; }

  std::vector<Identifier> services_of_thing(const Identifier& thing) const {
    std::vector<Identifier> out;
    for (const auto& [id, s] : services_)
      if (s.thing_id == thing) out.push_back(id);
    return out;
  }

  // Functional concepts with at least one registered service.
  std::set<std::string> advertised_concepts() const {
    std::set<std::string> out;
    for (const auto& [_, s] : services_) out.insert(s.functional_concept);
    return out;
  }

  // Top-level branches touched by local services (functional concepts and
  // outputs), announced to the cloud's gateway index.
  std::set<std::string> advertised_top_level() const {
    std::set<std::string> out;
    auto add = [&](const std::string& c) {
      if (auto t = taxonomy_->top_level_ancestor(c)) out.insert(*t);
    };
    for (const auto& [_, s] : services_) {
      add(s.functional_concept);
      for (const auto& o : s.outputs) {
        if (taxonomy_->contains(o)) add(o);
      }
    }
    return out;
  }

  std::vector<Triple> triples() const {
    std::vector<Triple> out;
    for (const auto& [_, d] : things_) {
      auto ts = to_triples(d);
      out.insert(out.end(), ts.begin(), ts.end());
    }
    for (const auto& [_, s] : services_) {
      auto ts = to_triples(s);
      out.insert(out.end(), ts.begin(), ts.end());
    }
    return out;
  }

  // -- registration leases ---------------------------------------------------

  void refresh_thing(const Identifier& id, double now_ms) {
    if (!things_.count(id)) raise(Errc::not_found, id.render());
    last_refresh_[id] = now_ms;
  }

  double last_refresh(const Identifier& id) const {
    auto it = last_refresh_.find(id);
    if (it == last_refresh_.end()) raise(Errc::not_found, id.render());
    return it->second;
  }

  std::vector<Identifier> stale_things(double now_ms, double lifetime_ms) const {
    std::vector<Identifier> out;
    for (const auto& [id, t] : last_refresh_)
      if (now_ms - t > lifetime_ms) out.push_back(id);
    return out;
  }

  // test hook: drop exactly one index insertion
  void skip_next_index_update() { skip_next_index_update_ = true; }

  // id-counter snapshot so a failed multi-entry registration can roll back
  // without leaving gaps in the identifier sequence
  std::pair<unsigned, unsigned> sequence_state() const {
    return {next_thing_seq_, next_service_seq_};
  }
  void restore_sequence_state(std::pair<unsigned, unsigned> s) {
    next_thing_seq_ = s.first;
    next_service_seq_ = s.second;
  }

 private:
  void require_concept(const std::string& c) const {
    if (!taxonomy_->contains(c)) raise(Errc::unknown_concept, c);
  }

  void index_add(const Identifier& id, const ServiceDescription& s) {
    if (skip_next_index_update_) {
      skip_next_index_update_ = false;
      return;
    }
    for (const auto& anc : taxonomy_->ancestors_of(s.functional_concept))
      by_concept_[anc].insert(id);
    for (const auto& kw : s.keywords) by_keyword_[kw].insert(id);
  }

  void index_remove(const Identifier& id, const ServiceDescription& s) {
    for (const auto& anc : taxonomy_->ancestors_of(s.functional_concept)) {
      auto it = by_concept_.find(anc);
      if (it != by_concept_.end()) {
        it->second.erase(id);
        if (it->second.empty()) by_concept_.erase(it);
      }
    }
    for (const auto& kw : s.keywords) {
      auto it = by_keyword_.find(kw);
      if (it != by_keyword_.end()) {
        it->second.erase(id);
        if (it->second.empty()) by_keyword_.erase(it);
      }
    }
  }

  void prune_empty_sectors() {
    for (auto it = sectors_.begin(); it != sectors_.end();)
      it = it->second.empty() ? sectors_.erase(it) : std::next(it);
  }

  const Taxonomy* taxonomy_;
  unsigned ordinal_;
  unsigned next_thing_seq_ = 0;
  unsigned next_service_seq_ = 0;
  std::map<Identifier, ThingDescription> things_;
  std::map<Identifier, ServiceDescription> services_;
  std::map<unsigned, std::set<Identifier>> sectors_;
  std::map<std::string, std::set<Identifier>> by_concept_;
  std::map<std::string, std::set<Identifier>> by_keyword_;
  std::map<Identifier, double> last_refresh_;
  mutable bool skip_next_index_update_ = false;
};

}  // namespace fogdisc

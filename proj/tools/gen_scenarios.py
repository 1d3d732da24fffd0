#!/usr/bin/env python3
"""Regenerates the bundled scenario files in scenarios/.

Placement is deterministic: a fixed catalog of service types is dealt onto
devices, and the churn timeline only queries concepts that are guaranteed to
stay resolvable (ring arcs owned by the killed node are avoided near the
kill). Ring geometry is mirrored here with the same key derivation the
overlay uses: top m bits of SHA-256.
"""

import argparse
import hashlib
import json
import os
import random

M = 16


def hkey(text: str) -> int:
  digest = hashlib.sha256(text.encode()).digest()
  return int.from_bytes(digest[:8], "big") >> (64 - M)


def owner(key: int, addresses) -> str:
  ring = sorted((hkey(a), a) for a in addresses)
  for nid, addr in ring:
    if nid >= key:
      return addr
  return ring[0][1]


THING_CTX = {
    "concept": "fog:concept",
    "endpoint": "fog:endpoint",
    "location": "fog:location",
    "metadata": "fog:metadata",
    "name": "fog:name",
}

SVC_CTX = {
    "functional_concept": "fog:functionalConcept",
    "inputs": "fog:inputs",
    "keywords": "fog:keywords",
    "outputs": "fog:outputs",
    "path": "fog:path",
    "qos": "fog:qos",
    "sector": "fog:sector",
    "thing_id": "fog:thingId",
}

# (functional concept, inputs, keywords)
CATALOG = [
    ("iri:IndoorTemperature", [], ["indoor", "temperature", "room"]),
    ("iri:OutdoorTemperature", [], ["outdoor", "temperature", "weather"]),
    ("iri:Humidity", [], ["humidity", "moisture", "room"]),
    ("iri:Pressure", [], ["pressure", "barometric", "weather"]),
    ("iri:CO2Level", [], ["co2", "air", "quality"]),
    ("iri:ParticulateMatter", [], ["pm25", "dust", "air"]),
    ("iri:Luminosity", [], ["light", "lux", "ambient"]),
    ("iri:SoundLevel", [], ["noise", "decibel", "ambient"]),
    ("iri:WaterLeak", [], ["leak", "water", "basement"]),
    ("iri:Vibration", [], ["vibration", "machine", "health"]),
    ("iri:Occupancy", [], ["occupancy", "presence", "room"]),
    ("iri:Motion", [], ["motion", "pir", "hallway"]),
    ("iri:PowerDraw", [], ["power", "watts", "energy"]),
    ("iri:EnergyMeter", [], ["energy", "meter", "billing"]),
    ("iri:HeartRate", [], ["heart", "rate", "wearable"]),
    ("iri:BodyTemperature", [], ["body", "temperature", "wearable"]),
    ("iri:Heating", ["iri:ComfortIndex"], ["heating", "hvac", "radiator"]),
    ("iri:Cooling", ["iri:ComfortIndex"], ["cooling", "hvac", "chiller"]),
    ("iri:Ventilation", ["iri:AirQualityIndex"], ["ventilation", "hvac", "fan"]),
    ("iri:Dimming", ["iri:Luminosity"], ["dimming", "lighting", "mood"]),
    ("iri:Switching", ["iri:Occupancy"], ["switch", "lighting", "relay"]),
    ("iri:DoorLock", ["iri:Occupancy"], ["lock", "door", "security"]),
    ("iri:GateControl", ["iri:Motion"], ["gate", "barrier", "security"]),
    ("iri:ComfortIndex", ["iri:Temperature", "iri:Humidity"], ["comfort", "pmv", "index"]),
    ("iri:AirQualityIndex", ["iri:AirQuality"], ["aqi", "air", "index"]),
    ("iri:AnomalyDetection", ["iri:PowerDraw"], ["anomaly", "detection", "alerts"]),
    ("iri:WeatherForecast", ["iri:OutdoorTemperature", "iri:Pressure"], ["weather", "forecast", "daily"]),
    ("iri:EnergyForecast", ["iri:EnergyMeter"], ["energy", "forecast", "load"]),
    ("iri:OccupancyEstimate", ["iri:Motion", "iri:SoundLevel"], ["occupancy", "estimate", "fusion"]),
    ("iri:Averaging", ["iri:EnvironmentSensing"], ["average", "window", "smoothing"]),
    ("iri:Histogram", ["iri:EnergySensing"], ["histogram", "bins", "profile"]),
    ("iri:UnitConversion", ["iri:Temperature"], ["units", "celsius", "fahrenheit"]),
    ("iri:Scheduling", ["iri:OccupancyEstimate"], ["schedule", "planner", "calendar"]),
    ("iri:TimeSeriesStore", ["iri:Sensing"], ["timeseries", "store", "history"]),
    ("iri:EventLog", ["iri:AnomalyDetection"], ["events", "log", "audit"]),
    ("iri:SmsAlert", ["iri:AnomalyDetection"], ["sms", "alert", "oncall"]),
    ("iri:PushAlert", ["iri:ComfortIndex"], ["push", "alert", "mobile"]),
    ("iri:DailyReport", ["iri:EnergyForecast"], ["report", "daily", "summary"]),
]

CATALOG_BY_FC = {fc: (inputs, kws) for fc, inputs, kws in CATALOG}


def make_qos(rng):
  return {
      "availability": round(rng.uniform(0.9, 0.999), 3),
      "delay_ms": round(rng.uniform(5.0, 50.0), 1),
      "price": round(rng.uniform(1.0, 20.0), 2),
      "reliability": round(rng.uniform(0.9, 0.999), 3),
      "security_level": rng.randint(1, 5),
  }


def make_service(fc, seq, rng):
  inputs, kws = CATALOG_BY_FC[fc]
  return {
      "@context": SVC_CTX,
      "@type": "Service",
      "functional_concept": fc,
      "inputs": sorted(inputs),
      "keywords": sorted(kws),
      "outputs": [fc],
      "path": "/svc/%d" % seq,
      "qos": make_qos(rng),
      "sector": 0,
  }


def make_thing(name, concept, addr, rng):
  return {
      "@context": THING_CTX,
      "@type": "Thing",
      "concept": concept,
      "endpoint": "coap://" + addr,
      "location": {
          "latitude": round(rng.uniform(45.0, 48.0), 4),
          "longitude": round(rng.uniform(7.0, 10.0), 4),
      },
      "metadata": {"room": "r%d" % rng.randint(1, 40), "vendor": "acme"},
      "name": name,
  }


def make_device(addr, gateway, fcs, rng, refresh_ms=30000):
  services = [make_service(fc, i + 1, rng) for i, fc in enumerate(fcs)]
  return {
      "address": addr,
      "auto_refresh_ms": refresh_ms,
      "gateway": gateway,
      "services": services,
      "thing": make_thing(addr + "-thing", fcs[0], addr, rng),
  }


def gateway_cfg(addr, ordinal, bootstrap=None):
  cfg = {"address": addr, "ordinal": ordinal}
  if bootstrap:
    cfg["bootstrap"] = bootstrap
  return cfg


def register_actions(devices, start_ms, step_ms):
  return [
      {"action": "register", "device": d["address"], "time_ms": start_ms + i * step_ms}
      for i, d in enumerate(devices)
  ]


def write(path, doc):
  with open(path, "w") as f:
    json.dump(doc, f, sort_keys=True, separators=(",", ":"))
    f.write("\n")
  print("wrote %s" % path)


# -- smoke ----------------------------------------------------------------------


def gen_smoke(out_dir):
  rng = random.Random(1)
  devices = [
      make_device("dev-1", "gw1", ["iri:IndoorTemperature", "iri:Humidity"], rng),
      make_device("dev-2", "gw2", ["iri:ComfortIndex"], rng),
      make_device("dev-3", "gw2", ["iri:PushAlert"], rng),
  ]
  timeline = register_actions(devices, 2000, 200)
  timeline += [
      {"action": "query", "queries": ["rt=iri:IndoorTemperature"], "target": "gw1", "time_ms": 8000},
      {"action": "query", "queries": ["rt=iri:ComfortIndex"], "target": "gw1", "time_ms": 9000},
      {
          "action": "compose",
          "request": {
              "available_inputs": ["iri:Humidity", "iri:IndoorTemperature"],
              "goal_outputs": ["iri:PushAlert"],
          },
          "target": "cloud",
          "time_ms": 12000,
      },
      {"action": "audit_ring", "time_ms": 20000},
  ]
  doc = {
      "cloud": {"address": "cloud", "taxonomy_path": "../data/taxonomy_cloud.txt"},
      "devices": devices,
      "duration_ms": 30000,
      "gateways": [gateway_cfg("gw1", 1), gateway_cfg("gw2", 2, "gw1")],
      "taxonomy": "../data/taxonomy_fog.txt",
      "timeline": timeline,
  }
  write(os.path.join(out_dir, "smoke.json"), doc)


# -- e2e ------------------------------------------------------------------------


def gen_e2e(out_dir):
  rng = random.Random(2)
  gateways = [gateway_cfg("gw1", 1)]
  gateways += [gateway_cfg("gw%d" % i, i, "gw1") for i in range(2, 9)]
  gw_names = [g["address"] for g in gateways]

  # 100 service instances: whole catalog twice, then two dozen extras.
  # Pinned placements keep the composition chains split across gateways so the
  # provisioning round-trip has to widen its input set.
  pinned = {
      "iri:ComfortIndex": ["gw1", "gw2"],
      "iri:PushAlert": ["gw5", "gw6"],
      "iri:AnomalyDetection": ["gw3", "gw3"],
      "iri:SmsAlert": ["gw7", "gw7"],
      "iri:EventLog": ["gw8", "gw8"],
  }
  extras = [
      "iri:IndoorTemperature", "iri:Humidity", "iri:CO2Level", "iri:Motion",
      "iri:Occupancy", "iri:PowerDraw", "iri:Luminosity", "iri:Pressure",
      "iri:IndoorTemperature", "iri:Humidity", "iri:EnergyMeter", "iri:SoundLevel",
      "iri:OutdoorTemperature", "iri:ParticulateMatter", "iri:Vibration", "iri:WaterLeak",
      "iri:HeartRate", "iri:BodyTemperature", "iri:Averaging", "iri:TimeSeriesStore",
      "iri:Heating", "iri:Switching", "iri:Dimming", "iri:WeatherForecast",
  ]
  instances = []  # (fc, gateway)
  cursor = 0
  for copy in range(2):
    for fc, _, _ in CATALOG:
      if fc in pinned:
        instances.append((fc, pinned[fc][copy]))
      else:
        instances.append((fc, gw_names[cursor % len(gw_names)]))
        cursor += 1
  for fc in extras:
    instances.append((fc, gw_names[cursor % len(gw_names)]))
    cursor += 1
  assert len(instances) == 100

  by_gw = {g: [] for g in gw_names}
  for fc, gw in instances:
    by_gw[gw].append(fc)

  devices = []
  hosts = {}
  for gw in gw_names:
    fcs = by_gw[gw]
    # 4 services per device, remainder on the last one
    chunks = [fcs[i:i + 4] for i in range(0, len(fcs), 4)]
    if len(chunks) > 1 and len(chunks[-1]) < 3:
      chunks[-2] += chunks[-1]
      chunks.pop()
    for chunk in chunks:
      addr = "dev-%d" % (len(devices) + 1)
      devices.append(make_device(addr, gw, chunk, rng))
      for fc in chunk:
        hosts.setdefault(fc, set()).add(gw)

  timeline = register_actions(devices, 2000, 200)

  fcs_cycle = [fc for fc, _, _ in CATALOG]
  queries = []
  for i in range(50):
    t = 15000 + i * 1300
    fc = fcs_cycle[i % len(fcs_cycle)]
    hosting = sorted(hosts[fc])
    q = "rt=" + fc
    variant = i % 5
    if variant == 1:
      q += " k=3"
    elif variant == 2:
      q += " kw=" + CATALOG_BY_FC[fc][1][0]
    if i % 10 == 6:
      target = "cloud"
    elif i % 2 == 0:
      target = hosting[i // 2 % len(hosting)]  # answered from the local directory
    else:
      # force the overlay path: a high bar rules the target's own near-miss
      # matches out, and only gateways without the exact concept are asked
      others = [g for g in gw_names if g not in hosts[fc]]
      target = others[i // 2 % len(others)]
      q += " minsim=0.9"
    queries.append({"action": "query", "queries": [q], "target": target, "time_ms": t})
  timeline += queries

  compose_reqs = [
      {"available_inputs": ["iri:Humidity", "iri:IndoorTemperature"],
       "goal_outputs": ["iri:ComfortIndex"]},
      {"available_inputs": ["iri:Humidity", "iri:IndoorTemperature"],
       "goal_outputs": ["iri:PushAlert"]},
      {"available_inputs": ["iri:PowerDraw"],
       "goal_outputs": ["iri:EventLog", "iri:SmsAlert"]},
      # repeat of the first one: served from the plan cache
      {"available_inputs": ["iri:Humidity", "iri:IndoorTemperature"],
       "goal_outputs": ["iri:ComfortIndex"]},
  ]
  for i, req in enumerate(compose_reqs):
    timeline.append({"action": "compose", "request": req, "target": "cloud",
                     "time_ms": 81000 + i * 500})
  timeline.append({"action": "audit_ring", "time_ms": 85000})

  doc = {
      "cloud": {"address": "cloud", "taxonomy_path": "../data/taxonomy_cloud.txt"},
      "devices": devices,
      "duration_ms": 90000,
      "gateways": gateways,
      "links": {"cloud_latency_ms": 40.0, "drop_prob": 0.0, "fog_latency_ms": 5.0},
      "taxonomy": "../data/taxonomy_fog.txt",
      "timeline": sorted(timeline, key=lambda a: a["time_ms"]),
  }
  write(os.path.join(out_dir, "e2e.json"), doc)


# -- churn ----------------------------------------------------------------------


def gen_churn(out_dir):
  rng = random.Random(4)
  stable = ["gw1", "gw2", "gw3", "gw4"]
  volatile = ["gw5", "gw6", "gw7", "gw8"]
  joiners = ["gw9", "gw10", "gw11", "gw12", "gw13"]
  gateways = [gateway_cfg("gw1", 1)]
  gateways += [gateway_cfg("gw%d" % i, i, "gw1") for i in range(2, 9)]

  # services live only on the stable gateways, two copies of each concept
  fcs = [fc for fc, inputs, _ in CATALOG if not inputs][:12]
  placement = {g: [] for g in stable}
  hosts = {}
  for j, fc in enumerate(fcs):
    a = stable[j % 4]
    b = stable[(j + 2) % 4]
    placement[a].append(fc)
    placement[b].append(fc)
    hosts[fc] = {a, b}
  devices = []
  for gw in stable:
    fcs_here = placement[gw]
    for chunk in (fcs_here[:3], fcs_here[3:]):
      if not chunk:
        continue
      addr = "dev-%d" % (len(devices) + 1)
      devices.append(make_device(addr, gw, chunk, rng))

  timeline = register_actions(devices, 2000, 250)

  membership = []
  for i, gw in enumerate(joiners):
    membership.append({
        "action": "join_gateway",
        "config": gateway_cfg(gw, 9 + i, "gw1"),
        "time_ms": 20000 + i * 15000,
    })
  for i, gw in enumerate(["gw6", "gw7", "gw8"]):
    membership.append({"action": "leave_gateway", "gateway": gw, "time_ms": 95000 + i * 15000})
  membership.append({"action": "kill_gateway", "gateway": "gw5", "time_ms": 140000})
  timeline += membership

  # ring membership when the kill lands: joiners are in, the leavers are out
  pre_kill_ring = stable + ["gw5"] + joiners
  unsafe_after_kill = {fc for fc in fcs if owner(hkey(fc), pre_kill_ring) == "gw5"}

  for i in range(100):
    t = 15000 + i * 1560
    fc = fcs[i % len(fcs)]
    if t >= 135000 and fc in unsafe_after_kill:
      for alt in fcs:
        if alt not in unsafe_after_kill:
          fc = alt
          break
    target = stable[i % 4]
    q = "rt=" + fc
    if target not in hosts[fc]:
      q += " minsim=0.9"  # push it onto the overlay
    timeline.append({"action": "query", "queries": [q], "target": target, "time_ms": t})

  timeline.append({"action": "audit_ring", "time_ms": 175000})

  doc = {
      "cloud": {"address": "cloud", "taxonomy_path": "../data/taxonomy_cloud.txt"},
      "devices": devices,
      "duration_ms": 180000,
      "gateways": gateways,
      "taxonomy": "../data/taxonomy_fog.txt",
      "timeline": sorted(timeline, key=lambda a: a["time_ms"]),
  }
  write(os.path.join(out_dir, "churn.json"), doc)


def main():
  ap = argparse.ArgumentParser()
  ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "scenarios"))
  args = ap.parse_args()
  os.makedirs(args.out, exist_ok=True)
  assert hkey("iri:Temp") == 56185, "key derivation drifted from the overlay"
  gen_smoke(args.out)
  gen_e2e(args.out)
  gen_churn(args.out)


if __name__ == "__main__":
  main()

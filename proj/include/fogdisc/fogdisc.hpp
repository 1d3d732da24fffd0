#pragma once

// Umbrella header: the full fog discovery stack.

#include "fogdisc/common.hpp"
#include "fogdisc/model.hpp"
#include "fogdisc/taxonomy.hpp"
#include "fogdisc/triples.hpp"
#include "fogdisc/sparql.hpp"
#include "fogdisc/jsonld.hpp"
#include "fogdisc/coap.hpp"
#include "fogdisc/link_format.hpp"
#include "fogdisc/http_map.hpp"
#include "fogdisc/simnet.hpp"
#include "fogdisc/coap_endpoint.hpp"
#include "fogdisc/proxy.hpp"
#include "fogdisc/chord.hpp"
#include "fogdisc/overlay.hpp"
#include "fogdisc/matchmaker.hpp"
#include "fogdisc/ranking.hpp"
#include "fogdisc/directory.hpp"
#include "fogdisc/rd_wire.hpp"
#include "fogdisc/composer.hpp"
#include "fogdisc/gateway.hpp"
#include "fogdisc/cloud.hpp"
#include "fogdisc/scenario.hpp"

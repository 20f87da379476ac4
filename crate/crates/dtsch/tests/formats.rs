use dtsch::formats::{events_tsv, links_tsv, nodes_tsv, parse_key_values, report_text, schedule_csv, SCHEDULE_HEADER};
use dtsch::scenarios::{one_channel, three_link_backlog, tree16};
use dtsch_core::scheduler::{omni_baseline, run_scheduling_period, Routes};
use dtsch_core::sim::{run, Event, SimConfig, TrafficModel};

#[test]
fn schedule_dump_lists_cells_and_beams() {
    let (topo, tree) = tree16();
    let routes = Routes::from_tree(&tree);
    let dir = run_scheduling_period(&topo, &routes, &three_link_backlog(), &one_channel()).unwrap();
    assert_eq!(schedule_csv(&dir.schedule), format!("{SCHEDULE_HEADER}\n0,0,2,0,1,3\n0,0,4,1,1,3\n0,0,10,3,2,4\n"));
    let omni = omni_baseline(&topo, &routes, &three_link_backlog(), &one_channel()).unwrap();
    assert_eq!(schedule_csv(&omni.schedule), format!("{SCHEDULE_HEADER}\n0,0,2,0,-,-\n1,0,4,1,-,-\n2,0,10,3,-,-\n"));
}

fn small_run() -> dtsch_core::sim::SimOutput {
    let (topo, tree) = tree16();
    let cfg = SimConfig { duration: 3.0, traffic: TrafficModel::Poisson { rate_pps: 20.0 }, ..SimConfig::default() };
    run(&cfg, &topo, &Routes::from_tree(&tree)).unwrap()
}

#[test]
fn report_values_round_trip_exactly() {
    let out = small_run();
    let r = &out.report;
    let kv = parse_key_values(&report_text(r, &[("mode", "directional".into())]));
    assert_eq!(kv["mode"], "directional");
    assert_eq!(kv["generated"].parse::<u64>().unwrap(), r.generated);
    assert_eq!(kv["throughput_bps"].parse::<f64>().unwrap(), r.aggregate_throughput);
    assert_eq!(kv["delay_mean_s"].parse::<f64>().unwrap(), r.mean_delay().unwrap());
    assert_eq!(kv["total_energy_j"].parse::<f64>().unwrap(), r.total_energy);
    assert_eq!(kv["schedule_length_mean"].parse::<f64>().unwrap(), r.schedule_length_mean);
}

#[test]
fn undefined_values_print_as_na() {
    let (topo, tree) = tree16();
    let cfg = SimConfig { duration: 1.0, traffic: TrafficModel::Cbr { rate_pps: 0.0 }, ..SimConfig::default() };
    let r = run(&cfg, &topo, &Routes::from_tree(&tree)).unwrap().report;
    let kv = parse_key_values(&report_text(&r, &[]));
    assert_eq!(kv["delay_mean_s"], "n/a");
    assert_eq!(kv["delivery_ratio"], "n/a");
}

#[test]
fn tables_have_one_row_per_item() {
    let out = small_run();
    let nodes = nodes_tsv(&out.report);
    assert_eq!(nodes.lines().count(), 1 + 16);
    let links = links_tsv(&out.report);
    assert_eq!(links.lines().count(), 1 + out.report.links.len());
    let bits: u64 = links.lines().skip(1).map(|l| l.split('\t').nth(3).unwrap().parse::<u64>().unwrap()).sum();
    let logged: u64 = out.log.events.iter().map(|e| if let Event::Tx { bits, .. } = e { *bits } else { 0 }).sum();
    assert_eq!(bits, logged);
}

#[test]
fn event_log_has_one_line_per_event() {
    let out = small_run();
    let text = events_tsv(&out.log);
    assert_eq!(text.lines().count(), 2 + out.log.events.len());
    let generates = text.lines().filter(|l| l.contains("\tgenerate\t")).count() as u64;
    assert_eq!(generates, out.report.generated);
}

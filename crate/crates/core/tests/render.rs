use proptest::prelude::*;
use tlm_forge::trace::{parse_trace, render_svg, render_text, sort_records, write_trace};
use tlm_forge::{ResponseStatus, SimTime, TraceRecord};

fn traces() -> impl Strategy<Value = Vec<TraceRecord>> {
    prop::collection::vec(
        (0usize..4, 0u64..2_000_000, 0u64..100_000, prop::sample::select(&ResponseStatus::ALL[1..])),
        0..30,
    )
    .prop_map(|raw| {
        let mut counts = [0u64; 4];
        let names = ["Brake", "Router", "ABS & <1>", "x"];
        let mut records: Vec<TraceRecord> = raw
            .into_iter()
            .enumerate()
            .map(|(i, (lane, start, len, status))| {
                counts[lane] += 1;
                TraceRecord {
                    instance: names[lane].to_string(),
                    activation: counts[lane] - 1,
                    start: SimTime::from_ps(start),
                    end: SimTime::from_ps(start + len),
                    txn_id: i as u64,
                    status,
                }
            })
            .collect();
        sort_records(&mut records);
        records
    })
}

proptest! {
    #[test]
    fn one_green_and_one_red_marker_per_record(trace in traces()) {
        let svg = render_svg(&trace);
        prop_assert_eq!(svg.matches("fill=\"green\"").count(), trace.len());
        prop_assert_eq!(svg.matches("fill=\"red\"").count(), trace.len());
        prop_assert_eq!(svg.matches("<circle").count(), 2 * trace.len());
        prop_assert_eq!(&svg, &render_svg(&trace));
    }

    #[test]
    fn csv_round_trips(trace in traces()) {
        let text = write_trace(&trace);
        prop_assert_eq!(parse_trace(&text).unwrap(), trace.clone());
        prop_assert_eq!(write_trace(&parse_trace(&text).unwrap()), text);
    }

    #[test]
    fn text_chart_has_a_row_per_lane(trace in traces()) {
        let lanes: std::collections::BTreeSet<_> = trace.iter().map(|r| r.instance.clone()).collect();
        prop_assert_eq!(render_text(&trace).lines().count(), lanes.len() + 1);
    }
}

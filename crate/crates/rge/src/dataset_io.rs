//! Reading and writing the four-file benchmark text format.
//!
//! A dataset named `NAME` lives in a directory containing:
//!
//! * `NAME_A.txt` — one edge per line as two 1-indexed global node ids,
//!   separated by a comma and/or whitespace. Undirected edges are usually
//!   listed in both directions; duplicates are folded silently.
//! * `NAME_graph_indicator.txt` — line `i` holds the 1-indexed id of the
//!   graph that global node `i` belongs to.
//! * `NAME_graph_labels.txt` — one class id per graph.
//! * `NAME_node_labels.txt` — optional, one label per global node.
//!
//! Class ids and node labels may be arbitrary integers in the files; both
//! are remapped to consecutive ids starting at zero, in ascending order of
//! the original values. The writer emits the same format (each edge in
//! both directions), so a write/parse round trip is the identity.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{Dataset, Graph};

/// Parses a benchmark-format dataset from `root/`.
///
/// Nodes are renumbered 0-indexed per graph; each undirected edge is
/// stored once even if the file lists both directions.
pub fn parse_dataset(root: &Path, name: &str) -> Result<Dataset> {
    let file = |suffix: &str| root.join(format!("{name}_{suffix}.txt"));

    let indicator_path = file("graph_indicator");
    let edges_path = file("A");
    let graph_labels_path = file("graph_labels");
    let node_labels_path = file("node_labels");

    for path in [&edges_path, &indicator_path, &graph_labels_path] {
        if !path.is_file() {
            return Err(Error::MissingFile(path.clone()));
        }
    }

    // graph_indicator: global node id (1-indexed) -> graph id (1-indexed)
    let indicator = read_int_lines(&indicator_path, 1)?;
    let total_nodes = indicator.len();
    if total_nodes == 0 {
        return Err(Error::Consistency {
            file: display(&indicator_path),
            line: 1,
            message: "no nodes listed".into(),
        });
    }
    let num_graphs = *indicator.iter().map(|(v, _)| &v[0]).max().unwrap() as usize;
    let mut graph_of_node = vec![0usize; total_nodes];
    let mut node_counts = vec![0usize; num_graphs];
    for (node_idx, (values, line)) in indicator.iter().enumerate() {
        let gid = values[0];
        if gid < 1 || gid > num_graphs as i64 {
            return Err(Error::Consistency {
                file: display(&indicator_path),
                line: *line,
                message: format!("graph id {gid} outside 1..={num_graphs}"),
            });
        }
        graph_of_node[node_idx] = gid as usize - 1;
        node_counts[gid as usize - 1] += 1;
    }
    if let Some(empty) = node_counts.iter().position(|&c| c == 0) {
        return Err(Error::Consistency {
            file: display(&indicator_path),
            line: 1,
            message: format!("graph {} has no nodes", empty + 1),
        });
    }

    // Local index of each global node within its graph.
    let mut local_index = vec![0u32; total_nodes];
    let mut seen = vec![0u32; num_graphs];
    for node_idx in 0..total_nodes {
        let g = graph_of_node[node_idx];
        local_index[node_idx] = seen[g];
        seen[g] += 1;
    }

    // Edges.
    let mut edge_sets: Vec<BTreeSet<(u32, u32)>> = vec![BTreeSet::new(); num_graphs];
    for (values, line) in read_int_lines(&edges_path, 2)? {
        let (u, v) = (values[0], values[1]);
        for id in [u, v] {
            if id < 1 || id > total_nodes as i64 {
                return Err(Error::Consistency {
                    file: display(&edges_path),
                    line,
                    message: format!("node id {id} outside 1..={total_nodes}"),
                });
            }
        }
        let (ui, vi) = (u as usize - 1, v as usize - 1);
        if graph_of_node[ui] != graph_of_node[vi] {
            return Err(Error::Consistency {
                file: display(&edges_path),
                line,
                message: format!(
                    "edge ({u}, {v}) crosses graphs {} and {}",
                    graph_of_node[ui] + 1,
                    graph_of_node[vi] + 1
                ),
            });
        }
        if u == v {
            return Err(Error::Consistency {
                file: display(&edges_path),
                line,
                message: format!("self-loop on node {u}"),
            });
        }
        let (a, b) = (local_index[ui], local_index[vi]);
        edge_sets[graph_of_node[ui]].insert((a.min(b), a.max(b)));
    }

    // Graph labels, remapped to 0..C-1 in ascending order of raw value.
    let raw_graph_labels: Vec<(Vec<i64>, usize)> = read_int_lines(&graph_labels_path, 1)?;
    if raw_graph_labels.len() != num_graphs {
        return Err(Error::Consistency {
            file: display(&graph_labels_path),
            line: raw_graph_labels.len().max(1),
            message: format!("{} labels for {} graphs", raw_graph_labels.len(), num_graphs),
        });
    }
    let raw: Vec<i64> = raw_graph_labels.iter().map(|(v, _)| v[0]).collect();
    let graph_labels = remap_consecutive(&raw);

    // Node labels, optional, remapped the same way over the whole dataset.
    let node_labels = if node_labels_path.is_file() {
        let rows = read_int_lines(&node_labels_path, 1)?;
        if rows.len() != total_nodes {
            return Err(Error::Consistency {
                file: display(&node_labels_path),
                line: rows.len().max(1),
                message: format!("{} labels for {} nodes", rows.len(), total_nodes),
            });
        }
        let raw: Vec<i64> = rows.iter().map(|(v, _)| v[0]).collect();
        Some(remap_consecutive(&raw))
    } else {
        None
    };

    let mut graphs = Vec::with_capacity(num_graphs);
    for g in 0..num_graphs {
        let labels = node_labels.as_ref().map(|all| {
            (0..total_nodes)
                .filter(|&i| graph_of_node[i] == g)
                .map(|i| all[i] as u32)
                .collect::<Vec<u32>>()
        });
        graphs.push(Graph::new(
            node_counts[g],
            edge_sets[g].iter().copied(),
            labels,
        )?);
    }

    Dataset::new(name, graphs, graph_labels)
}

/// Writes `dataset` in the benchmark format under `root/`, one file per
/// component; each undirected edge is listed in both directions.
pub fn write_dataset(dataset: &Dataset, root: &Path) -> Result<()> {
    fs::create_dir_all(root)?;
    let name = dataset.name();
    let file = |suffix: &str| root.join(format!("{name}_{suffix}.txt"));

    let mut indicator = String::new();
    let mut edges = String::new();
    let mut node_labels = String::new();
    let mut offset = 1usize; // 1-indexed global id of each graph's first node
    for (gi, graph) in dataset.graphs().iter().enumerate() {
        for local in 0..graph.node_count() {
            indicator.push_str(&format!("{}\n", gi + 1));
            if let Some(labels) = graph.node_labels() {
                node_labels.push_str(&format!("{}\n", labels[local]));
            }
        }
        let mut directed: Vec<(usize, usize)> = Vec::with_capacity(graph.edge_count() * 2);
        for &(a, b) in graph.edges() {
            let (ga, gb) = (offset + a as usize, offset + b as usize);
            directed.push((ga, gb));
            directed.push((gb, ga));
        }
        directed.sort_unstable();
        for (u, v) in directed {
            edges.push_str(&format!("{u}, {v}\n"));
        }
        offset += graph.node_count();
    }

    let mut labels = String::new();
    for &l in dataset.graph_labels() {
        labels.push_str(&format!("{l}\n"));
    }

    fs::File::create(file("A"))?.write_all(edges.as_bytes())?;
    fs::File::create(file("graph_indicator"))?.write_all(indicator.as_bytes())?;
    fs::File::create(file("graph_labels"))?.write_all(labels.as_bytes())?;
    if dataset.has_node_labels() {
        fs::File::create(file("node_labels"))?.write_all(node_labels.as_bytes())?;
    }
    Ok(())
}

fn display(path: &Path) -> String {
    path.display().to_string()
}

/// Reads non-blank lines of exactly `arity` integers, separated by commas
/// and/or whitespace. Returns each row with its 1-based line number.
fn read_int_lines(path: &Path, arity: usize) -> Result<Vec<(Vec<i64>, usize)>> {
    let content = fs::read_to_string(path)?;
    let mut rows = Vec::new();
    for (idx, line) in content.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut values = Vec::with_capacity(arity);
        for token in line.split(|c: char| c == ',' || c.is_whitespace()) {
            if token.is_empty() {
                continue;
            }
            let value = token.parse::<i64>().map_err(|_| Error::Parse {
                file: display(path),
                line: line_no,
                message: format!("expected an integer, found {token:?}"),
            })?;
            values.push(value);
        }
        if values.len() != arity {
            return Err(Error::Parse {
                file: display(path),
                line: line_no,
                message: format!("expected {arity} integers, found {}", values.len()),
            });
        }
        rows.push((values, line_no));
    }
    Ok(rows)
}

/// Maps arbitrary integers onto 0..k-1 in ascending order of raw value.
fn remap_consecutive(raw: &[i64]) -> Vec<usize> {
    let mut distinct: Vec<i64> = raw.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    raw.iter()
        .map(|v| distinct.binary_search(v).unwrap())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn write(dir: &Path, name: &str, content: &str) {
        fs::write(dir.join(name), content).unwrap();
    }

    #[test]
    fn parses_smallest_dataset() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "T_A.txt", "1, 2\n2, 1\n");
        write(dir.path(), "T_graph_indicator.txt", "1\n1\n");
        write(dir.path(), "T_graph_labels.txt", "1\n");
        let ds = parse_dataset(dir.path(), "T").unwrap();
        assert_eq!(ds.len(), 1);
        assert_eq!(ds.graph(0).node_count(), 2);
        assert_eq!(ds.graph(0).edges(), &[(0, 1)]);
        assert_eq!(ds.graph_labels(), &[0]);
        assert!(!ds.has_node_labels());
    }

    #[test]
    fn missing_file_is_named() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "T_A.txt", "1, 2\n");
        write(dir.path(), "T_graph_labels.txt", "1\n");
        match parse_dataset(dir.path(), "T") {
            Err(Error::MissingFile(p)) => {
                assert!(p.to_string_lossy().contains("T_graph_indicator.txt"))
            }
            other => panic!("expected MissingFile, got {other:?}"),
        }
    }

    #[test]
    fn cross_graph_edge_is_consistency_error_with_line() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "T_A.txt", "1, 2\n1, 3\n");
        write(dir.path(), "T_graph_indicator.txt", "1\n1\n2\n");
        write(dir.path(), "T_graph_labels.txt", "1\n2\n");
        match parse_dataset(dir.path(), "T") {
            Err(Error::Consistency { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected Consistency, got {other:?}"),
        }
    }

    #[test]
    fn non_integer_token_is_parse_error_with_line() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "T_A.txt", "1, 2\n2, x\n");
        write(dir.path(), "T_graph_indicator.txt", "1\n1\n");
        write(dir.path(), "T_graph_labels.txt", "1\n");
        match parse_dataset(dir.path(), "T") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected Parse, got {other:?}"),
        }
    }

    #[test]
    fn labels_remap_to_consecutive_from_zero() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "T_A.txt", "1, 2\n3, 4\n");
        write(dir.path(), "T_graph_indicator.txt", "1\n1\n2\n2\n");
        write(dir.path(), "T_graph_labels.txt", "7\n-3\n");
        write(dir.path(), "T_node_labels.txt", "5\n9\n5\n2\n");
        let ds = parse_dataset(dir.path(), "T").unwrap();
        assert_eq!(ds.graph_labels(), &[1, 0]);
        assert_eq!(ds.graph(0).node_labels().unwrap(), &[1, 2]);
        assert_eq!(ds.graph(1).node_labels().unwrap(), &[1, 0]);
    }

    #[test]
    fn round_trips_through_write() {
        let dir = tempfile::tempdir().unwrap();
        let g0 = Graph::new(3, vec![(0, 1), (1, 2)], Some(vec![0, 1, 0])).unwrap();
        let g1 = Graph::new(2, vec![(0, 1)], Some(vec![2, 0])).unwrap();
        let ds = Dataset::new("RT", vec![g0, g1], vec![0, 1]).unwrap();
        write_dataset(&ds, dir.path()).unwrap();
        let back = parse_dataset(dir.path(), "RT").unwrap();
        assert_eq!(back, ds);
    }
}
